#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "epmat/ep.hpp"
#include "epmat/expm.hpp"
#include "epmat/minor.hpp"
#include "epmat/pclass.hpp"

#include "support/matrices.hpp"
#include "support/oracles.hpp"

#include <cmath>
#include <numbers>
#include <string>

using namespace epmat;

namespace {

bool notes_mention(const EPVerdict& v, const std::string& needle) {
  for (const auto& n : v.notes) {
    if (n.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("frozen minor-product table of the reference eigenbasis") {
  const Matrix T = fixtures::eigenbasis3();
  const Matrix R = minor_symmetry_products(T, 1);
  Matrix expected(3, 3);
  expected << 0, -12, -12, -18, -6, 0, -6, -6, -12;
  CHECK((R - expected).cwiseAbs().maxCoeff() <= 1e-9);

  const double detT = minor_of(T, IndexSet::full(3), IndexSet::full(3));
  CHECK(detT == doctest::Approx(-24.0).epsilon(1e-12));

  // Negative determinant against a nonpositive table: every product
  // det(T) * r is nonnegative and each row has a strictly positive one.
  for (int r = 0; r < 3; ++r) {
    double rowmax = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double p = detT * R(r, c);
      CHECK(p >= 0.0);
      rowmax = std::max(rowmax, p);
    }
    CHECK(rowmax > 1.0);
  }

  CHECK_THROWS_AS(minor_symmetry_products(T, 0), DomainError);
  CHECK_THROWS_AS(minor_symmetry_products(T, 4), DomainError);
}

TEST_CASE("signed tridiagonal matrix certifies through a signature flip") {
  const EPVerdict v = classify_ep(fixtures::signed_tridiag3());
  CHECK(v.status == EPStatus::EP);
  REQUIRE(v.certificate.has_value());
  CHECK(v.certificate->summary() == "signature_similarity(Jacobi)");
  CHECK(v.certificate->verify());
}

TEST_CASE("2x2 classification covers every discriminant branch") {
  // Nonnegative off-diagonal product: certified outright.
  const EPVerdict up = classify_ep(fixtures::nilpotent_upper2());
  CHECK(up.status == EPStatus::EP);
  REQUIRE(up.certificate.has_value());
  CHECK(up.certificate->kind == EPCertificateKind::TwoByTwoSign);
  CHECK(up.certificate->verify());

  Matrix wild(2, 2);
  wild << -5, 3, 2, 7;
  CHECK(classify_ep(wild).status == EPStatus::EP);

  // Zero discriminant: the minor 1 - t crosses at exactly t = 1.
  const EPVerdict nil = classify_ep(fixtures::nilpotent_full2());
  CHECK(nil.status == EPStatus::NotEP);
  CHECK_FALSE(nil.complex_spectrum);
  REQUIRE(nil.witness.has_value());
  CHECK(nil.witness->alpha.to_string() == "{2}");
  CHECK(nil.witness->t >= 1.0);
  CHECK(nil.witness->t <= 1.0 + 1e-6);
  CHECK(nil.witness->minor_value < 0.0);
  CHECK(minor_of(expm(fixtures::nilpotent_full2(), nil.witness->t),
                 nil.witness->alpha, nil.witness->alpha) < 0.0);

  // Positive discriminant: crossing at atanh(sqrt(disc)/|ap|)/sqrt(disc).
  const EPVerdict pn = classify_ep(fixtures::p_not_ep2());
  CHECK(pn.status == EPStatus::NotEP);
  CHECK_FALSE(pn.complex_spectrum);
  REQUIRE(pn.witness.has_value());
  CHECK(pn.witness->alpha.to_string() == "{2}");
  const double tstar = std::atanh(std::sqrt(27.0) / 6.0) / std::sqrt(27.0);
  CHECK(pn.witness->t == doctest::Approx(tstar).epsilon(1e-4));

  // Negative discriminant: spiral dynamics fail at pi / (2 w).
  for (double w : {0.5, 1.0, 2.0}) {
    const EPVerdict rot = classify_ep(fixtures::damped_rotation2(w));
    CHECK(rot.status == EPStatus::NotEP);
    CHECK(rot.complex_spectrum);
    REQUIRE(rot.witness.has_value());
    CHECK(std::abs(rot.witness->t - std::numbers::pi / (2 * w)) <= 1e-6);
    CHECK(rot.witness->minor_value < 0.0);
  }
}

TEST_CASE("block triangular matrix certifies blockwise") {
  const EPVerdict v = classify_ep(fixtures::block_triangular3());
  CHECK(v.status == EPStatus::EP);
  REQUIRE(v.certificate.has_value());
  CHECK(v.certificate->kind == EPCertificateKind::BlockReduction);
  CHECK(v.certificate->summary() == "BlockReduction[TwoByTwoSign; Triangular]");
  REQUIRE(v.certificate->children.size() == 2);
  CHECK(v.certificate->block_sizes == std::vector<int>{2, 1});
  CHECK(v.certificate->verify());
}

TEST_CASE("singular 3x3 matrix certifies by eigenbasis minor products") {
  const EPVerdict v = classify_ep(fixtures::minor_symmetric3());
  CHECK(v.status == EPStatus::EP);
  REQUIRE(v.certificate.has_value());
  CHECK(v.certificate->kind == EPCertificateKind::MinorSymmetry);
  REQUIRE(v.certificate->r_tables.size() == 1);
  CHECK(v.certificate->verify());

  // Spot check that the certified flow really keeps every principal minor
  // positive. Raw signs, not is_p_matrix: the spread of e^{lambda t} puts
  // honest minors below the scale-aware threshold at these times.
  for (double t : {0.3, 1.0, -2.0}) {
    for (const auto& [alpha, value] :
         principal_minors(expm(fixtures::minor_symmetric3(), t))) {
      CHECK(value > 0.0);
    }
  }
}

TEST_CASE("projection matrix certifies by idempotence plus sign symmetry") {
  const EPVerdict v = classify_ep(fixtures::projection3());
  CHECK(v.status == EPStatus::EP);
  REQUIRE(v.certificate.has_value());
  CHECK(v.certificate->kind == EPCertificateKind::SignSymProjection);
  CHECK(v.certificate->verify());
}

TEST_CASE("the property does not pass to principal submatrices") {
  const Matrix A = fixtures::minor_symmetric3();
  CHECK(classify_ep(A).status == EPStatus::EP);
  const Matrix S = submatrix(A, IndexSet(3, {1, 2}), IndexSet(3, {1, 2}));
  CHECK(S == fixtures::p_not_ep2());
  CHECK(classify_ep(S).status == EPStatus::NotEP);
}

TEST_CASE("one-by-one matrices are always certified") {
  Matrix A(1, 1);
  A << -7.0;
  const EPVerdict v = classify_ep(A);
  CHECK(v.status == EPStatus::EP);
  REQUIRE(v.certificate.has_value());
  CHECK(v.certificate->verify());
}

TEST_CASE("structural shapes are recognized in priority order") {
  Matrix tri(2, 2);
  tri << 1, 2, 0, 3;
  REQUIRE(structural_certificates(tri).has_value());
  CHECK(structural_certificates(tri)->kind == EPCertificateKind::Triangular);

  Matrix sym(2, 2);
  sym << 2, 1, 1, 2;
  CHECK(structural_certificates(sym)->kind == EPCertificateKind::Symmetric);

  Matrix jac(3, 3);
  jac << 2, 3, 0, 1, 2, 1, 0, 2, 2;
  const auto jc = structural_certificates(jac);
  REQUIRE(jc.has_value());
  CHECK(jc->kind == EPCertificateKind::Jacobi);
  CHECK(jc->verify());

  Matrix weak(3, 3);
  weak << 1, 0, 0, 1, 1, 1, 0, 0, 1;
  CHECK(structural_certificates(weak)->kind == EPCertificateKind::WeakJacobi);

  // Conjugating a symmetric matrix by diag(1,2,4) hides the symmetry; the
  // potential reconstruction recovers it.
  Matrix hidden(3, 3);
  hidden << 1, 0.5, 0.5, 2, 0, 0.5, 8, 2, 3;
  const auto hc = structural_certificates(hidden);
  REQUIRE(hc.has_value());
  CHECK(hc->kind == EPCertificateKind::TransformOf);
  CHECK(hc->transform == EPTransform::pos_diag_similarity);
  REQUIRE(hc->children.size() == 1);
  CHECK(hc->children[0].kind == EPCertificateKind::Symmetric);
  CHECK(hc->verify());

  Matrix none(3, 3);
  none << 1, 2, 3, -4, 5, 6, 7, -8, 9;
  CHECK_FALSE(structural_certificates(none).has_value());
}

TEST_CASE("weak Jacobi shapes get the perturbation certificate, others do not") {
  Matrix weak(3, 3);
  weak << 1, 0, 0, 1, 1, 1, 0, 0, 1;
  REQUIRE(tn_perturbation_certificate(weak).has_value());
  CHECK(tn_perturbation_certificate(weak)->kind ==
        EPCertificateKind::WeakJacobi);

  Matrix one(1, 1);
  one << 4;
  CHECK(tn_perturbation_certificate(one).has_value());

  CHECK_FALSE(
      tn_perturbation_certificate(fixtures::minor_symmetric3()).has_value());
}

TEST_CASE("property-preserving wrappers verify against the stored child") {
  const Matrix A = fixtures::signed_tridiag3();
  const EPVerdict base = classify_ep(A);
  REQUIRE(base.certificate.has_value());
  const EPCertificate inner = *base.certificate;

  auto wrap = [&](EPTransform tr, Matrix parent) {
    EPCertificate c;
    c.kind = EPCertificateKind::TransformOf;
    c.transform = tr;
    c.matrix = std::move(parent);
    c.children.push_back(inner);
    return c;
  };

  EPCertificate sc = wrap(EPTransform::scale, 2.5 * A);
  sc.scale_factor = 2.5;
  CHECK(sc.verify());
  sc.scale_factor = 2.0;
  CHECK_FALSE(sc.verify());
  sc.scale_factor = -2.5;
  CHECK_FALSE(sc.verify());

  CHECK(wrap(EPTransform::transpose, A.transpose()).verify());
  CHECK(wrap(EPTransform::negate, -A).verify());
  CHECK_FALSE(wrap(EPTransform::negate, A).verify());

  const std::vector<int> p{3, 1, 2};
  Matrix perm(3, 3);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) perm(r, c) = A(p[r] - 1, p[c] - 1);
  }
  EPCertificate pc = wrap(EPTransform::perm_similarity, perm);
  pc.permutation = p;
  CHECK(pc.verify());
  pc.permutation = {1, 1, 2};
  CHECK_FALSE(pc.verify());

  Vector d(3);
  d << 1, 2, 4;
  EPCertificate dc = wrap(
      EPTransform::pos_diag_similarity,
      d.asDiagonal() * A * d.cwiseInverse().asDiagonal());
  dc.diagonal = d;
  CHECK(dc.verify());

  Vector s(3);
  s << 1, -1, -1;
  EPCertificate sg = wrap(EPTransform::signature_similarity,
                          s.asDiagonal() * A * s.asDiagonal());
  sg.diagonal = s;
  CHECK(sg.verify());
  sg.diagonal = 2.0 * s;
  CHECK_FALSE(sg.verify());

  EPCertificate sh = wrap(EPTransform::commuting_diag_shift,
                          A + 1.3 * Matrix::Identity(3, 3));
  sh.diagonal = 1.3 * Vector::Ones(3);
  CHECK(sh.verify());
  // A non-scalar diagonal does not commute with this irreducible matrix.
  Vector bad(3);
  bad << 1.0, 2.0, 3.0;
  EPCertificate sh2 = wrap(EPTransform::commuting_diag_shift,
                           A + Matrix(bad.asDiagonal()));
  sh2.diagonal = bad;
  CHECK_FALSE(sh2.verify());
}

TEST_CASE("classification never falsifies transformed certified matrices") {
  const std::vector<Matrix> certified = {
      fixtures::signed_tridiag3(), fixtures::block_triangular3(),
      fixtures::minor_symmetric3(), fixtures::projection3()};
  const std::vector<int> p{2, 3, 1};
  Vector d(3), s(3);
  d << 1, 2, 0.5;
  s << 1, -1, 1;

  for (const Matrix& A : certified) {
    REQUIRE(classify_ep(A).status == EPStatus::EP);

    std::vector<Matrix> family;
    family.push_back(2.5 * A);
    family.push_back(A.transpose());
    Matrix perm(3, 3);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) perm(r, c) = A(p[r] - 1, p[c] - 1);
    }
    family.push_back(perm);
    family.push_back(d.asDiagonal() * A * d.cwiseInverse().asDiagonal());
    family.push_back(s.asDiagonal() * A * s.asDiagonal());
    family.push_back(A + 1.7 * Matrix::Identity(3, 3));

    for (const Matrix& B : family) {
      CHECK(classify_ep(B).status != EPStatus::NotEP);
    }
  }
}

TEST_CASE("negating a certified matrix leaves nothing for the falsifier") {
  const FalsifyResult f = falsify_ep(-fixtures::signed_tridiag3());
  CHECK_FALSE(f.witness.has_value());
  CHECK_FALSE(f.complex_spectrum);
  CHECK(f.evidence.points > 0);
  CHECK(f.evidence.min_minor > 0.0);
}

TEST_CASE("grid falsifier locates the crossing without analytic hints") {
  const FalsifyResult f = falsify_ep(fixtures::p_not_ep2());
  REQUIRE(f.witness.has_value());
  CHECK(f.witness->alpha.to_string() == "{2}");
  const double tstar = std::atanh(std::sqrt(27.0) / 6.0) / std::sqrt(27.0);
  CHECK(f.witness->t == doctest::Approx(tstar).epsilon(1e-3));
  CHECK(f.witness->minor_value < 0.0);
}

TEST_CASE("grid options bound the scanned window") {
  Matrix sym(2, 2);
  sym << 2, 1, 1, 2;
  TimeGridSpec g;
  g.t_max = 5.0;
  g.log_points = 64;
  g.linear_points = 64;
  g.include_negative = false;
  const FalsifyResult f = falsify_ep(sym, g);
  CHECK_FALSE(f.witness.has_value());
  CHECK(f.evidence.t_min == 0.0);
  CHECK(f.evidence.t_max == 5.0);
  CHECK(f.evidence.points >= 64);
  CHECK(f.evidence.points <= 128);
  CHECK(f.evidence.min_minor > 0.9);
  CHECK_FALSE(f.evidence.truncated);
}

TEST_CASE("non-real spectrum routes to the wedge-boundary witness") {
  Matrix A(3, 3);
  A << 0, -1, 0, 1, 0, 0, 0, 0, -1;
  const FalsifyResult f = falsify_ep(A);
  CHECK(f.complex_spectrum);
  REQUIRE(f.witness.has_value());
  CHECK(f.witness->alpha.size() == 1);
  CHECK(std::abs(f.witness->t - std::numbers::pi / 2) <= 1e-5);
  CHECK(minor_of(expm(A, f.witness->t), f.witness->alpha, f.witness->alpha) <
        0.0);

  const EPVerdict v = classify_ep(A);
  CHECK(v.status == EPStatus::NotEP);
  CHECK(v.complex_spectrum);
  CHECK(v.witness.has_value());
}

TEST_CASE("witnesses lift from diagonal blocks through the permutation") {
  Matrix M = Matrix::Zero(4, 4);
  M(0, 0) = -1;
  M(2, 2) = -1;
  M(1, 1) = 15;
  M(1, 3) = -9;
  M(3, 1) = 1;
  M(3, 3) = 3;

  const BlockDecomposition dec = block_reduce(M);
  CHECK(dec.blocks.size() == 3);

  const EPVerdict v = classify_ep(M);
  CHECK(v.status == EPStatus::NotEP);
  REQUIRE(v.witness.has_value());
  CHECK(v.witness->alpha.to_string() == "{4}");
  const double tstar = std::atanh(std::sqrt(27.0) / 6.0) / std::sqrt(27.0);
  CHECK(v.witness->t == doctest::Approx(tstar).epsilon(1e-3));
  CHECK(notes_mention(v, "witness lifted from diagonal block"));
  CHECK(minor_of(expm(M, v.witness->t), v.witness->alpha, v.witness->alpha) <
        0.0);
}

TEST_CASE("an eigenbasis failing the product condition leaves Undecided") {
  Matrix T(3, 3);
  T << 1, 1, 1, 1, 2, 4, 1, 3, 9;
  Vector lam(3);
  lam << 1, 2, 3;
  const Matrix A = T * lam.asDiagonal() * T.inverse();

  const MinorSymmetryResult ms = minor_symmetry_certificate(A);
  CHECK(ms.outcome == MinorSymmetryOutcome::condition_fails);
  CHECK(ms.detail.find("negative product at k=1") != std::string::npos);

  ClassifyOptions opt;
  opt.certificates_only = true;
  const EPVerdict v = classify_ep(A, opt);
  CHECK(v.status == EPStatus::Undecided);
  CHECK(notes_mention(v, "eigenbasis minor products"));
  CHECK(notes_mention(v, "grid falsifier skipped on request"));
  CHECK(notes_mention(v, "no certificate applies"));
}

TEST_CASE("screens report heuristic evidence, never certificates") {
  // A certified matrix can still fail the power screen; the screen is a
  // one-way filter.
  const PowerScreenReport bad =
      power_sign_symmetry_screen(fixtures::minor_symmetric3());
  CHECK_FALSE(bad.all_pass);
  REQUIRE(bad.first_failure.has_value());
  CHECK(bad.first_failure->k == 1);
  CHECK(bad.first_failure->ell == 1);

  Matrix sym(2, 2);
  sym << 2, 1, 1, 2;
  const PowerScreenReport good = power_sign_symmetry_screen(sym);
  CHECK(good.all_pass);
  CHECK(good.checks > 0);

  Matrix path(3, 3);
  path << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  const TNScreenReport tn_good = tn_screen(path);
  CHECK(tn_good.all_pass);
  CHECK(tn_good.checks > 0);

  const TNScreenReport tn_bad = tn_screen(fixtures::signed_tridiag3());
  CHECK_FALSE(tn_bad.all_pass);
  REQUIRE(tn_bad.first_failure.has_value());
  CHECK(tn_bad.first_failure->value < 0.0);

  CHECK_THROWS_AS(tn_screen(Matrix::Identity(9, 9)), CapacityError);
  CHECK_THROWS_AS(power_sign_symmetry_screen(Matrix::Identity(9, 9)),
                  CapacityError);
}

TEST_CASE("falsifier capacity cuts off at order twelve") {
  CHECK_THROWS_AS(falsify_ep(Matrix::Identity(13, 13)), CapacityError);

  // Above that, a non-real spectrum still decides, witness-free.
  Matrix big = -Matrix::Identity(13, 13);
  big(0, 0) = 0;
  big(0, 1) = -1;
  big(1, 0) = 1;
  big(1, 1) = 0;
  const EPVerdict v = classify_ep(big);
  CHECK(v.status == EPStatus::NotEP);
  CHECK(v.complex_spectrum);
  CHECK_FALSE(v.witness.has_value());
  CHECK(notes_mention(v, "spectral decision only"));
}
