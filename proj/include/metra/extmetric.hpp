#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "metra/ext_rational.hpp"
#include "metra/limits.hpp"
#include "metra/verdict.hpp"

namespace metra {

/// Square matrix of extended distances, row-major. Carries no axioms; use
/// check_pseudometric to validate.
class DistMatrix {
 public:
  DistMatrix() = default;
  explicit DistMatrix(std::size_t n, const ExtRational& fill = ExtRational());

  /// Zero diagonal, infinity elsewhere: the discrete extended metric.
  static DistMatrix discrete(std::size_t n);

  /// Throws ShapeError unless `rows` is square.
  static DistMatrix from_rows(const std::vector<std::vector<ExtRational>>& rows);

  std::size_t size() const noexcept { return n_; }
  const ExtRational& operator()(std::size_t i, std::size_t j) const { return cells_[i * n_ + j]; }
  ExtRational& operator()(std::size_t i, std::size_t j) { return cells_[i * n_ + j]; }
  std::span<const ExtRational> cells() const noexcept { return cells_; }

  /// Sets (i,j) and (j,i).
  void set_symmetric(std::size_t i, std::size_t j, const ExtRational& v) {
    (*this)(i, j) = v;
    (*this)(j, i) = v;
  }

  /// Pointwise comparison: every entry of *this is <= the matching entry of `other`.
  bool pointwise_le(const DistMatrix& other) const;

  friend bool operator==(const DistMatrix&, const DistMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<ExtRational> cells_;
};

/// OK iff d(x,x)=0, symmetry and the triangle inequality hold. Failures use the
/// codes "reflexivity" (witness x), "symmetry" (x,y) and "triangle" (x,y,z with
/// d(x,z) > d(x,y) + d(y,z)), reported in that order of precedence.
Verdict check_pseudometric(const DistMatrix& m);

/// Same check on raw nested rows; non-square input raises ShapeError.
Verdict check_pseudometric(const std::vector<std::vector<ExtRational>>& rows);

/// check_pseudometric plus separation (code "separation", witness x,y).
Verdict check_metric(const DistMatrix& m);

/// A validated finite (extended) metric space with labelled points.
class FiniteMetricSpace {
 public:
  FiniteMetricSpace() = default;
  /// Throws AxiomError if `dist` is not a metric, ShapeError on size mismatch.
  FiniteMetricSpace(std::vector<std::string> labels, DistMatrix dist);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const DistMatrix& dist() const noexcept { return dist_; }
  const ExtRational& operator()(std::size_t i, std::size_t j) const { return dist_(i, j); }

  friend bool operator==(const FiniteMetricSpace&, const FiniteMetricSpace&) = default;

 private:
  std::vector<std::string> labels_;
  DistMatrix dist_;
};

/// Class assignment of a metric identification. Class ids are numbered in
/// order of their smallest member; the representative of each class is that
/// smallest member.
struct QuotientMap {
  std::vector<std::size_t> class_of;
  std::vector<std::size_t> representative;

  std::size_t num_classes() const noexcept { return representative.size(); }
  std::vector<std::vector<std::size_t>> classes() const;
};

struct Identification {
  FiniteMetricSpace space;
  QuotientMap map;
};

/// Collapses zero-distance pairs. Labels of the output are the labels of the
/// class representatives. Throws AxiomError if `p` is not a pseudometric.
Identification metric_identification(const DistMatrix& p, const std::vector<std::string>& labels);
Identification metric_identification(const DistMatrix& p);

/// Mixed-radix encoding of tuples, first coordinate most significant. Used for
/// product carriers and operation-table indexing.
class TupleCodec {
 public:
  explicit TupleCodec(std::vector<std::size_t> radices);
  std::size_t count() const noexcept { return count_; }
  std::size_t arity() const noexcept { return radices_.size(); }
  std::size_t encode(std::span<const std::size_t> digits) const;
  std::vector<std::size_t> decode(std::size_t code) const;
  std::size_t digit(std::size_t code, std::size_t position) const;

 private:
  std::vector<std::size_t> radices_;
  std::vector<std::size_t> strides_;
  std::size_t count_ = 1;
};

/// Cartesian product with the supremum metric. Labels are "(x,y,...)".
/// Throws ArityError on an empty list.
FiniteMetricSpace sup_product(const std::vector<FiniteMetricSpace>& spaces);

/// d(x, A) = min over a in A of d(x, a). Throws DomainError on empty A or
/// out-of-range ids.
ExtRational point_set_distance(std::size_t x, std::span<const std::size_t> subset,
                               const FiniteMetricSpace& space);

/// Hausdorff distance between nonempty subsets of one space.
ExtRational hausdorff_distance(std::span<const std::size_t> a, std::span<const std::size_t> b,
                               const FiniteMetricSpace& space);

ExtRational diameter(const FiniteMetricSpace& space);

/// Gromov-Hausdorff distance, computed as half the least distortion over all
/// correspondences between the two carriers. Requires finite distances
/// (UnsupportedInput otherwise) and |X|*|Y| <= limits.correspondences
/// (ResourceError otherwise).
ExtRational gromov_hausdorff(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                             const Limits& limits = {});

/// Distortion of a relation given as (x, y) pairs.
ExtRational distortion(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                       std::span<const std::pair<std::size_t, std::size_t>> relation);

/// `f[i]` is the image of point i. Throws DomainError if f is not total into y.
bool is_nonexpansive_map(std::span<const std::size_t> f, const FiniteMetricSpace& x,
                         const FiniteMetricSpace& y);
bool is_isometric_embedding(std::span<const std::size_t> f, const FiniteMetricSpace& x,
                            const FiniteMetricSpace& y);

}  // namespace metra
