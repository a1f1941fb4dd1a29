#pragma once

// The canonical spanning tree of a rectangular grid used by every path
// integrator: walk the base row outward from the base node, then walk each
// column outward from the base row. Columns are independent once the base
// row is done, so they are handed to parallel_for; every node is written by
// exactly one column, which keeps the result independent of the schedule.

#include "surfrec/gridfield.hpp"
#include "surfrec/parallel.hpp"

namespace surfrec {

/// One tree edge: from `from` to the neighbour `to` along `axis`, with the
/// signed parameter step `step` (+h or -h).
struct SweepEdge {
  GridIndex from;
  GridIndex to;
  Axis axis;
  double step;
};

/// Fills `out` by propagating out[base] along the tree with
/// out[e.to] = advance(out[e.from], e). `out[base]` must already be set.
/// `visit` is called once per node after it has been written (base
/// included), from the thread that wrote it.
template <typename T, typename Advance, typename Visit>
void sweep_tree(GridField<T>& out, GridIndex base, int threads, Advance&& advance, Visit&& visit) {
  const GridSpec& s = out.spec();
  if (!s.contains(base)) throw ValidationError("sweep base node lies outside the grid");
  const double h = s.h;
  const int row = base.j;

  visit(base);
  for (int i = base.i + 1; i < s.nx; ++i) {
    const SweepEdge e{{i - 1, row}, {i, row}, Axis::x, h};
    out(i, row) = advance(out(i - 1, row), e);
    visit(e.to);
  }
  for (int i = base.i - 1; i >= 0; --i) {
    const SweepEdge e{{i + 1, row}, {i, row}, Axis::x, -h};
    out(i, row) = advance(out(i + 1, row), e);
    visit(e.to);
  }

  parallel_for(s.nx, threads, [&](int i) {
    for (int j = row + 1; j < s.ny; ++j) {
      const SweepEdge e{{i, j - 1}, {i, j}, Axis::y, h};
      out(i, j) = advance(out(i, j - 1), e);
      visit(e.to);
    }
    for (int j = row - 1; j >= 0; --j) {
      const SweepEdge e{{i, j + 1}, {i, j}, Axis::y, -h};
      out(i, j) = advance(out(i, j + 1), e);
      visit(e.to);
    }
  });
}

template <typename T, typename Advance>
void sweep_tree(GridField<T>& out, GridIndex base, int threads, Advance&& advance) {
  sweep_tree(out, base, threads, std::forward<Advance>(advance), [](GridIndex) {});
}

}  // namespace surfrec
