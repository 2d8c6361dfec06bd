#include "support.hpp"

#include "oracles.hpp"
#include "qilab/group_ops.hpp"

#include <cmath>
#include <numbers>

using namespace qilab;

namespace {

Point e(int axis) { return basis_vector(3, axis); }

HAlphaCertificate cert(double alpha, double K, double R) {
  HAlphaCertificate c;
  c.alpha = alpha;
  c.K = K;
  c.R = R;
  return c;
}

QICertificate qi(double K, double C) {
  QICertificate q;
  q.K = K;
  q.C = C;
  return q;
}

Map rotation(int k) { return Map::block_rotation(3, 2.0 * std::numbers::pi / k, 0, 1); }

}  // namespace

TEST_CASE("cosets of dilations and bounded perturbations") {
  const auto plan = default_plan(3);
  const Verdict diff = coset_equal_mod_H(Map::dilation(3, 2.0), Map::dilation(3, 2.5), plan, 1e-2);
  CHECK(diff.refuted());
  REQUIRE(diff.profile);
  for (const auto& en : diff.profile->entries) CHECK(en.sup_ratio == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(coset_equal_mod_H(Map::dilation(3, 2.0), Map::dilation(3, 2.0), plan, 1e-2).confirmed());

  const Map f = Map::linear_over_log(3);
  CHECK(coset_equal_mod_H(f, compose(Map::translation(e(1) * 50.0), f), plan, 1e-2).confirmed());
  CHECK(coset_equal_mod_H(Map::identity(3), f, plan, 1e-2).confirmed());
  CHECK_CODE(coset_equal_mod_H(Map::identity(3), Map::identity(2), plan, 1e-2), ErrorCode::DimensionMismatch);
}

TEST_CASE("commutation defects") {
  const auto plan = default_plan(3);
  Matrix A(3, 3);
  A << 1, 2, 0, 0, 1, 0, 3, 0, 1;
  const Point b = Point::Constant(3, 1.0) * 5.0;
  const auto aff = commutation_defect(Map::affine(A, b), Map::dilation(3, 3.0), plan);
  for (const auto& en : aff.absolute.entries) {
    CHECK(en.sup_ratio == doctest::Approx(2.0 * b.norm()).epsilon(1e-6));
    CHECK(en.inf_ratio == doctest::Approx(2.0 * b.norm()).epsilon(1e-6));
  }

  auto plan2 = default_plan(2);
  const auto polar = commutation_defect(Map::polar_exp(2), Map::dilation(2, 3.0), plan2);
  for (const auto& en : polar.absolute.entries) CHECK(en.sup_ratio <= 1e-14 * en.radius * 100.0);

  // A rotates the same plane, so it commutes with the block rotation.
  const double phi = 0.4, theta = std::numbers::pi / 3.0;
  Matrix R = Matrix::Identity(3, 3);
  R(0, 0) = std::cos(phi);
  R(0, 1) = -std::sin(phi);
  R(1, 0) = std::sin(phi);
  R(1, 1) = std::cos(phi);
  Point c(3);
  c << 30.0, -40.0, 7.0;
  const auto rot = commutation_defect(Map::affine(R, c), Map::block_rotation(3, theta, 0, 1), plan);
  const double want = oracle::rotation_offset_defect(30.0, -40.0, theta);
  for (const auto& en : rot.absolute.entries) CHECK(en.sup_ratio == doctest::Approx(want).epsilon(1e-6));

  const auto trans = commutation_defect(Map::translation(e(0) * 10.0), Map::linear_over_log(3), plan);
  CHECK(trans.relative.entries.back().sup_ratio < 1e-6);
  CHECK(trans.relative.entries.back().sup_ratio < trans.relative.entries.front().sup_ratio);

  CHECK_CODE(commutation_defect(Map::identity(3), Map::identity(2), plan), ErrorCode::DimensionMismatch);
}

TEST_CASE("torsion orders of block rotations") {
  const auto plan = default_plan(3);
  for (int k : {2, 3, 4, 6}) {
    CAPTURE(k);
    const auto t = torsion_order_mod_H(rotation(k), 12, plan, 1e-2);
    REQUIRE(t.order);
    CHECK(*t.order == k);
    REQUIRE(t.powers.size() == static_cast<std::size_t>(k));
    for (int m = 1; m < k; ++m) {
      CHECK(t.powers[m - 1].refuted());
      CHECK(t.powers[m - 1].metrics.at("tail_min_sup") ==
            doctest::Approx(2.0 * std::sin(std::numbers::pi * m / k)).epsilon(1e-9));
    }
  }
}

TEST_CASE("torsion of reflection, identity and dilation") {
  const auto t1 = torsion_order_mod_H(Map::reflection(1), 12, default_plan(1), 1e-2);
  REQUIRE(t1.order);
  CHECK(*t1.order == 2);
  const auto t_id = torsion_order_mod_H(Map::identity(3), 12, default_plan(3), 1e-2);
  REQUIRE(t_id.order);
  CHECK(*t_id.order == 1);
  const auto t_dil = torsion_order_mod_H(Map::dilation(3, 2.0), 5, default_plan(3), 1e-2);
  CHECK_FALSE(t_dil.order);
  CHECK(t_dil.powers.size() == 5);
  CHECK_CODE(torsion_order_mod_H(Map::identity(3), 0, default_plan(3), 1e-2), ErrorCode::InvalidArgument);
}

TEST_CASE("composition certificates") {
  const double alpha = 0.5;
  const auto f = cert(alpha, 2.0, 1.0);
  const auto g = cert(alpha, 3.0, 1.0);
  const auto q = qi(2.0, 0.0);

  const auto max_rule = composition_certificate_max_rule(f, g, q);
  CHECK(max_rule.K == doctest::Approx(oracle::max_rule_K(2.0, 3.0, 2.0, alpha)));
  CHECK(max_rule.K == doctest::Approx(3.0));

  const auto sum = composition_certificate(f, g, q);
  CHECK(sum.K == doctest::Approx(2.0 * std::sqrt(2.0) + 3.0).epsilon(1e-14));
  CHECK(sum.R == doctest::Approx(2.0));
  CHECK(sum.kind == CertificateKind::Derived);

  const auto zero = composition_certificate(cert(alpha, 0.0, 1.0), cert(alpha, 0.0, 1.0), qi(1.0, 0.0));
  CHECK(zero.K == 0.0);

  CHECK_CODE(composition_certificate(f, cert(0.3, 3.0, 1.0), q), ErrorCode::AlphaMismatch);
}

TEST_CASE("the max rule undercounts log drift composed with itself") {
  // |ff(x) - x| is about 2 ln|x|, twice one drift; the max rule keeps only one.
  const auto plan = default_plan(3);
  const Map f = Map::log_drift(1.0, e(0));
  const auto hf = membership_H_alpha(f, 0.5, plan);
  REQUIRE(hf.certificate);
  const auto q = anchor_at_origin(estimate_qi_constants(f, plan), f);
  const Map ff = compose(f, f);

  const auto max_rule = composition_certificate_max_rule(*hf.certificate, *hf.certificate, q);
  CHECK(check_halpha_certificate(ff, max_rule, plan).refuted());

  const auto sum = composition_certificate(*hf.certificate, *hf.certificate, q);
  CHECK(check_halpha_certificate(ff, sum, plan).confirmed());
}

TEST_CASE("anchoring adds |f(0)|") {
  const auto q = anchor_at_origin(qi(1.5, 2.0), Map::translation(e(2) * 7.0));
  CHECK(q.K == 1.5);
  CHECK(q.C == doctest::Approx(9.0));
}

TEST_CASE("conjugation certificates") {
  const auto plan = default_plan(3);
  const Map g = Map::log_drift(1.0, e(0));
  const auto hg = membership_H_alpha(g, 0.5, plan);
  REQUIRE(hg.certificate);
  const double Kg = hg.certificate->K;

  const Map f = Map::dilation(3, 2.0);
  const Map finv = exact_inverse(f);
  const auto qf = anchor_at_origin(estimate_qi_constants(f, plan), f);
  const auto qfinv = anchor_at_origin(estimate_qi_constants(finv, plan), finv);
  const auto conj = conjugation_certificate(qf, qfinv, *hg.certificate, 0.0);
  CHECK(conj.K == doctest::Approx(2.0 * Kg * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(conj.kind == CertificateKind::Derived);
  CHECK(check_halpha_certificate(compose(f, compose(g, finv)), conj, plan).confirmed());

  const auto qid = estimate_qi_constants(Map::identity(3), plan);
  const auto by_id = conjugation_certificate(qid, qid, *hg.certificate, 0.0);
  CHECK(by_id.K == doctest::Approx(Kg).epsilon(2e-3));
}

TEST_CASE("witness sequences") {
  const auto plan = default_plan(3);
  for (const Map& f : {Map::reflection(3), rotation(2)}) {
    const auto w = build_witness_sequence(f, plan, 0.5);
    CHECK(w.epsilon == doctest::Approx(2.0).epsilon(1e-12));
    const auto& pts = w.sequence.points;
    REQUIRE(pts.size() >= 3);
    for (std::size_t m = 0; m + 1 < pts.size(); ++m) {
      const Point fa = evaluate(f, pts[m]);
      const Point fb = evaluate(f, pts[m + 1]);
      CHECK(pts[m + 1].norm() > pts[m].norm());
      CHECK(fb.norm() > fa.norm());
      CHECK((fb - pts[m + 1]).norm() > (fa - pts[m]).norm());
      CHECK(pts[m + 1].norm() > fa.norm());
    }
    CHECK(w.membership.refuted());
  }
  CHECK_CODE(build_witness_sequence(Map::identity(3), plan, 0.5), ErrorCode::NotOutsideH);
  CHECK_CODE(build_witness_sequence(Map::log_drift(1.0, e(0)), plan, 0.5), ErrorCode::NotOutsideH);
}

TEST_CASE("gadget radii") {
  const Point a = e(0) * 1000.0;
  CHECK(gadget_radius(Map::reflection(3), a, 2.0, CenterRule{}) == 1000.0);
  CHECK(gadget_radius(Map::dilation(3, 2.0), a, 0.3, CenterRule{}) == 150.0);
  CHECK(gadget_radius(Map::dilation(3, 1.001), a, 1.0, CenterRule{}) == doctest::Approx(0.5));
  // floor(1e8^(1/4) / 3) = 33.
  CHECK(gadget_radius(Map::dilation(3, 2.0), e(0) * 1e8, 1.0, CentralizerRule{0.5, 2.0}) == 33.0);
}

TEST_CASE("center-rule gadgets realise both identities") {
  const auto plan = default_plan(3);
  for (const Map& f : {Map::reflection(3), rotation(2), rotation(3), Map::dilation(3, 2.0)}) {
    const auto w = build_witness_sequence(f, plan, 0.5);
    const auto gadget = build_ball_gadget(f, w.sequence, w.epsilon, CenterRule{});
    const auto& d = gadget.data;
    REQUIRE(d.centers.size() >= 2);
    CHECK(gadget.epsilon == doctest::Approx(w.epsilon * std::pow(0.5, gadget.halvings)));

    // Disjointness and exclusion, straight from the data.
    for (std::size_t i = 0; i < d.centers.size(); ++i) {
      CHECK(d.centers[i].norm() > d.radii[i]);
      for (std::size_t j = i + 1; j < d.centers.size(); ++j) {
        CHECK((d.centers[i] - d.centers[j]).norm() > d.radii[i] + d.radii[j]);
      }
      for (const auto& a : gadget.witnesses) CHECK((a - d.centers[i]).norm() > d.radii[i]);
    }

    GadgetIdentities ids;
    CHECK(check_gadget_identities(f, gadget, &ids).confirmed());
    for (std::size_t k = 0; k < d.radii.size(); ++k) {
      CHECK(ids.step1[k] == doctest::Approx(d.radii[k] / 4.0).epsilon(1e-9));
      CHECK(ids.step2[k] == doctest::Approx(d.radii[k] / 4.0).epsilon(1e-9));
    }
    CHECK(ids.min_ratio >= gadget.epsilon / 8.0 - 1e-9);

    CHECK((evaluate(gadget.gadget, Point::Zero(3))).norm() == 0.0);
  }
}

TEST_CASE("centralizer-rule gadgets decay at rate alpha") {
  const auto plan = default_plan(3);
  const Map f = Map::dilation(3, 2.0);
  const auto w = build_witness_sequence(f, plan, 0.5);
  const auto gadget = build_ball_gadget(f, w.sequence, w.epsilon, CentralizerRule{0.5, 2.0});
  REQUIRE(gadget.data.centers.size() >= 2);
  const auto profile = gadget_alpha_profile(gadget.data, 0.5);
  for (std::size_t k = 0; k < profile.entries.size(); ++k) {
    // Inside ball k the displacement is at most r_k / 4 <= |c|^(1/4) / 12.
    const double c = profile.entries[k].radius;
    const double r = gadget.data.radii[k];
    CHECK(profile.entries[k].sup_ratio <= 0.25 * r / std::pow(c - r, 0.5) + 1e-15);
  }
  CHECK(check_gadget_decay(profile, 1e-2).confirmed());
}

TEST_CASE("sparse sequences cannot host a gadget") {
  WitnessSequence seq;
  seq.points = {e(0) * 100.0};
  CHECK_CODE(build_ball_gadget(Map::reflection(3), seq, 2.0, CenterRule{}), ErrorCode::WitnessTooSparse);
}
