#pragma once

// Quaternionic hermitian matrices over a maximal order, the lattices they
// define, isometry search and the enumeration of principally polarized
// classes by ell-neighbours.

#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "ssg/intmat.hpp"
#include "ssg/lattice.hpp"
#include "ssg/quat.hpp"

namespace ssg {

/// g x g matrix over the ambient algebra of `order`.
class QuatMatrix {
 public:
  QuatMatrix() = default;
  QuatMatrix(OrderPtr order, std::size_t g);
  static QuatMatrix identity(OrderPtr order, std::size_t g);
  static QuatMatrix diagonal(OrderPtr order, const std::vector<Quaternion>& d);

  std::size_t size() const { return g_; }
  const OrderPtr& order() const { return order_; }
  Quaternion& operator()(std::size_t r, std::size_t c) { return e_[r * g_ + c]; }
  const Quaternion& operator()(std::size_t r, std::size_t c) const { return e_[r * g_ + c]; }

  /// Every entry lies in the order.
  bool is_integral() const;
  bool is_hermitian() const;

  friend bool operator==(const QuatMatrix& a, const QuatMatrix& b) { return a.g_ == b.g_ && a.e_ == b.e_; }

 private:
  OrderPtr order_;
  std::size_t g_ = 0;
  std::vector<Quaternion> e_;
};

QuatMatrix dagger(const QuatMatrix& m);
QuatMatrix operator*(const QuatMatrix& a, const QuatMatrix& b);
QuatMatrix operator+(const QuatMatrix& a, const QuatMatrix& b);
QuatMatrix scale(const QuatMatrix& m, const Rational& r);

/// Reduced norm of a g x g matrix: the determinant of its 2g x 2g image
/// over the splitting field Q(i).
Rational reduced_norm_mat(const QuatMatrix& m);

/// Integral, positive-definite hermitian matrix over O.
class HermitianForm {
 public:
  HermitianForm() = default;
  /// Throws std::invalid_argument unless `h` is integral, hermitian and
  /// positive definite.
  explicit HermitianForm(QuatMatrix h);

  std::size_t genus() const { return h_.size(); }
  const QuatMatrix& matrix() const { return h_; }
  const OrderPtr& order() const { return h_.order(); }
  const Rational& hnm() const { return hnm_; }
  /// Trd(x^dagger H y) on the Z-basis e_k * o_r of O^g, index 4k + r.
  const IntMatrix& trace_gram() const { return gram_; }

  friend bool operator==(const HermitianForm& a, const HermitianForm& b) { return a.h_ == b.h_; }

 private:
  QuatMatrix h_;
  Rational hnm_;
  IntMatrix gram_;
};

/// Positive square root of reduced_norm_mat(H).
Rational haupt_norm(const HermitianForm& h);
Rational haupt_norm(const QuatMatrix& h);
/// H . M = M^dagger H M
HermitianForm act(const HermitianForm& h, const QuatMatrix& m);

/// A right O-lattice L of rank g inside H^g with an O-valued hermitian form
/// h(x, y), h(xa, yb) = conj(a) h(x, y) b, stored as integer data on a
/// Z-basis: the trace Gram (Q(x) = h(x, x)), the pairing tensor and the
/// matrices of right multiplication by the order basis.
class HermitianLattice {
 public:
  /// O^g with the form H.
  static HermitianLattice standard(const HermitianForm& h);
  /// A right ideal (Z-basis) with h(x, y) = conj(x) y / Nm(I).
  static HermitianLattice ideal(OrderPtr order, const std::array<Quaternion, 4>& basis);
  HermitianLattice() = default;

  /// The sublattice spanned by the columns of `cols` (coordinates in this
  /// lattice) with the form divided by `divisor`. Throws if the result is not
  /// O-stable or the form is not O-valued.
  HermitianLattice sublattice(const IntMatrix& cols, i64 divisor) const;

  const OrderPtr& order() const { return order_; }
  std::size_t genus() const { return g_; }
  std::size_t rank() const { return 4 * g_; }
  const GramForm& gram() const { return gram_; }
  /// h(e_a, e_b) = sum_r pairing()[r](a, b) o_r
  const std::array<IntMatrix, 4>& pairing() const { return pairing_; }
  /// coordinates of x o_r are right_action()[r] * x
  const std::array<IntMatrix, 4>& right_action() const { return action_; }
  OrderElt h(const IntVector& x, const IntVector& y) const;
  i64 q(const IntVector& x) const { return gram_.value(x); }
  IntVector act_right(const IntVector& x, const OrderElt& o) const;

  /// Vectors of H^g (g quaternions each) forming the Z-basis.
  const std::vector<std::vector<Quaternion>>& vectors() const { return vectors_; }
  /// Form on H^g (the matrix H, or [1/Nm(I)] for ideals).
  const QuatMatrix& form() const { return form_; }

  /// H-basis s_1..s_g of L (as coordinate vectors) used when L is the source
  /// of a map, and e_a = sum_k s_k q_k(a) with
  /// q_k(a) = sum_r coeff()[a][k][r] / denominator() * o_r.
  const std::vector<IntVector>& h_basis() const { return h_basis_; }
  const std::vector<std::vector<OrderElt>>& coeff() const { return coeff_; }
  i64 denominator() const { return denom_; }

  /// Number of vectors with Q(x) = v for v = 1..bound.
  std::vector<i64> theta(i64 bound) const;

 private:
  void finish();

  OrderPtr order_;
  std::size_t g_ = 0;
  GramForm gram_;
  std::array<IntMatrix, 4> pairing_;
  std::array<IntMatrix, 4> action_;
  std::vector<std::vector<Quaternion>> vectors_;
  QuatMatrix form_;
  std::vector<IntVector> h_basis_;
  std::vector<std::vector<OrderElt>> coeff_;
  i64 denom_ = 1;
};

/// Z-linear, right-O-linear maps Phi: src -> dst with
/// h_dst(Phi x, Phi y) = n h_src(x, y), as rank x rank integer matrices in
/// lattice coordinates.
class MapSearch {
 public:
  MapSearch(const HermitianLattice& dst, const HermitianLattice& src, i64 n);

  using Visitor = std::function<bool(const IntMatrix&)>;
  bool run(const Visitor& visit) const;
  bool run_from(const IntVector& first, const Visitor& visit) const;
  std::vector<IntVector> first_candidates() const { return search_.first_column_candidates(); }
  std::size_t first_index() const { return search_.first_column(); }
  std::size_t count_from(const IntVector& first) const;

 private:
  std::optional<IntMatrix> assemble(std::span<const IntVector> images) const;

  const HermitianLattice& dst_;
  const HermitianLattice& src_;
  ConstrainedMatrixSearch search_;
};

std::vector<IntMatrix> solve_maps(const HermitianLattice& dst, const HermitianLattice& src, i64 n);
/// Number of maps, using the orbits of `dst_aut` on the first image vector.
std::size_t count_maps(const HermitianLattice& dst, const HermitianLattice& src, i64 n,
                       const std::vector<IntMatrix>& dst_aut, unsigned jobs = 1);
std::optional<IntMatrix> find_isometry(const HermitianLattice& dst, const HermitianLattice& src);
std::vector<IntMatrix> automorphisms(const HermitianLattice& l);

/// All M in Mat_g(O) with M^dagger H1 M = n H2.
std::vector<QuatMatrix> solve_congruence(const HermitianForm& h1, const HermitianForm& h2, i64 n);
/// M with M^dagger H1 M = H2, if any.
std::optional<QuatMatrix> is_equivalent(const HermitianForm& h1, const HermitianForm& h2);
std::size_t automorphism_count(const HermitianForm& h);

/// Column k of M in Mat_g(O) as a coordinate vector of O^g, and back.
QuatMatrix matrix_from_images(const OrderPtr& order, const std::vector<IntVector>& columns);
IntVector coords_of_column(const QuatMatrix& m, std::size_t k);

/// A maximal isotropic right O-submodule N / ell L of L / ell L, i.e. an
/// ell-isogeny kernel. `key` is the reduced row echelon form mod ell of the
/// image of N, `basis` a Z-basis (columns) of N + ell L.
struct Lagrangian {
  IntMatrix key;
  IntMatrix basis;
};

/// Every maximal isotropic submodule, in a fixed order. Their number is
/// prod_{k=1..g} (ell^k + 1) (asserted).
std::vector<Lagrangian> lagrangians(const HermitianLattice& l, i64 ell);
/// Key of the sublattice spanned by the columns of `cols` (which contains
/// ell L).
IntMatrix sublattice_key(const IntMatrix& cols, i64 ell);

/// O-basis u_1..u_g of a lattice (free for g >= 2) as coordinate vectors,
/// preferring short vectors.
std::optional<std::vector<IntVector>> find_o_basis(const HermitianLattice& l);

struct PolarizedClass {
  HermitianLattice lattice;
  std::optional<HermitianForm> form;                  // g >= 2
  std::optional<std::array<Quaternion, 4>> ideal;     // g == 1
  Rational ideal_norm = 1;
  std::size_t e = 0;
  std::vector<i64> theta;
  std::vector<IntMatrix> aut;  // full automorphism group, in lattice coordinates
};

struct PolarizedClassSet {
  long p = 0;
  std::size_t g = 0;
  std::vector<PolarizedClass> classes;
  std::size_t h() const { return classes.size(); }
  Rational mass() const;
};

/// prod_{k=1..g} |zeta(1-2k)|/2 * prod_{k=1..g} (p^k + (-1)^k)
Rational genus_mass(long p, std::size_t g);

/// Theta-count bound used for class fingerprints.
i64 theta_bound(std::size_t g);

/// Classes by ell-neighbour closure from the identity form (g >= 2) or the
/// order itself (g = 1). Throws std::invalid_argument for g = 0, p not prime
/// or ell == p / ell not prime; std::logic_error when a completeness
/// certificate fails.
PolarizedClassSet class_set(long p, std::size_t g, long ell);
/// The class isometric to `l`, with an isometry from the class lattice
/// onto `l`.
struct ClassMatch {
  std::size_t index;
  IntMatrix iso;  // class lattice -> l
};
std::optional<ClassMatch> identify(const PolarizedClassSet& cs, const HermitianLattice& l);
/// Sort classes by (e, theta counts), keeping discovery order for ties.
void canonicalize(PolarizedClassSet& cs);

nlohmann::json to_json(const QuatMatrix& m);
QuatMatrix quat_matrix_from_json(const OrderPtr& order, const nlohmann::json& j);

}  // namespace ssg
