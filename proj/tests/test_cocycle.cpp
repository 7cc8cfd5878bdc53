#include <cmath>
#include <cstdlib>
#include <vector>

#include "doctest.h"
#include "lyapmax/cocycle.hpp"
#include "test_support.hpp"

using namespace lyapmax;
using testsupport::oracle::log_growth;

TEST_CASE("matrix kernel closed forms against independent oracles") {
    const Mat2 m{1, 2, 3, 4};
    // Singular values of [[1,2],[3,4]], frozen from an SVD oracle.
    CHECK(m.sigma1() == doctest::Approx(5.464985704219043).epsilon(1e-14));
    CHECK(m.sigma2() == doctest::Approx(0.3659661906262575).epsilon(1e-13));
    CHECK(m.top_right_singular_direction() ==
          doctest::Approx(0.9569101336077996).epsilon(1e-12));

    // Orientation-reversing case [[2,1],[1,-1]]: the closed form must not
    // lose the sign of det.
    const Mat2 r{2, 1, 1, -1};
    CHECK(r.det() == doctest::Approx(-3.0).epsilon(1e-15));
    CHECK(r.sigma1() == doctest::Approx(2.3027756377319952).epsilon(1e-14));
    CHECK(r.sigma2() == doctest::Approx(1.3027756377319946).epsilon(1e-14));
    CHECK(r.top_right_singular_direction() ==
          doctest::Approx(0.2940013017737835).epsilon(1e-12));

    // Symmetric positive definite: singular values are the eigenvalues.
    const Mat2 s{5, 2, 2, 1};
    CHECK(s.sigma1() == doctest::Approx(3.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-15));
    CHECK(s.sigma2() == doctest::Approx(3.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(s.spectral_radius() == doctest::Approx(3.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-15));

    // Rotations: complex eigenvalues, modulus sqrt(det).
    const Mat2 rot = testsupport::rotation(0.7);
    CHECK(rot.spectral_radius() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(rot.sigma1() == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS(Mat2({1, 2, 2, 4}).inverse(), InputError);
    const Mat2 inv = m.inverse();
    CHECK(inv.a == doctest::Approx(-2.0));
    CHECK(inv.b == doctest::Approx(1.0));
    CHECK(inv.c == doctest::Approx(1.5));
    CHECK(inv.d == doctest::Approx(-0.5));
}

TEST_CASE("scaled products survive lengths that overflow plain doubles") {
    const OneStepCocycle A = testsupport::separated_pair();
    ScaledMat2 p = ScaledMat2::identity();
    for (int i = 0; i < 1200; ++i) p.apply_left(A.generator(1));
    // ||A_1^n|| = (3 + 2 sqrt 2)^n exactly, so the log-norm is n * log_growth.
    CHECK(p.log_norm() == doctest::Approx(1200.0 * log_growth).epsilon(1e-13));
    CHECK(std::isfinite(p.m.max_abs()));
    CHECK(p.m.max_abs() <= 1e8);
    // The singular ratio is scale-free and collapses geometrically.
    CHECK(p.singular_ratio() <= std::pow(3.0 - 2.0 * std::sqrt(2.0), 2) / 0.9);
}

TEST_CASE("word products follow the first-symbol-rightmost convention") {
    const OneStepCocycle A = testsupport::separated_pair();
    // Word (1,2): symbol 1 read first, so the product is A_2 * A_1 = [[9,4],[20,9]].
    const Mat2 p = word_product(A, Word({1, 2}));
    CHECK(p.a == doctest::Approx(9.0));
    CHECK(p.b == doctest::Approx(4.0));
    CHECK(p.c == doctest::Approx(20.0));
    CHECK(p.d == doctest::Approx(9.0));
    const ScaledMat2 sp = scaled_word_product(A, Word({1, 2}));
    CHECK(sp.log_norm() == doctest::Approx(std::log(p.sigma1())).epsilon(1e-14));

    CHECK_THROWS_AS(word_product(A, Word({3})), InputError);
    // Inadmissible words are rejected under restricted transitions.
    CHECK_THROWS_AS(word_product(testsupport::golden_mean_pair(), Word({2, 2})), InputError);
}

TEST_CASE("periodic exponents are per-symbol spectral log-radii") {
    const OneStepCocycle A = testsupport::separated_pair();
    const TransitionMatrix f = TransitionMatrix::full_shift(2);
    CHECK(periodic_exponent(A, CyclicWord(Word({1}), f)) ==
          doctest::Approx(log_growth).epsilon(1e-14));
    // rho(A_2 A_1) = 9 + 4 sqrt 5 (trace 18, det 1); frozen oracle value.
    CHECK(periodic_exponent(A, CyclicWord(Word({1, 2}), f)) ==
          doctest::Approx(1.4436354751788103).epsilon(1e-14));
}

TEST_CASE("exponent bounds collapse for a single symmetric generator") {
    const OneStepCocycle A({Mat2{2, 0, 0, 1}});
    for (int n = 1; n <= 20; ++n) {
        CHECK(beta_upper(A, n) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
        CHECK(beta_lower(A, n).value == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    }
    const ExponentBracket br = exponent_bracket(A, 6, 6);
    CHECK(std::abs(br.width()) <= 1e-15);
    CHECK(br.witness == Word({1}));
}

TEST_CASE("exponent bracket encloses the growth rate of the separated pair") {
    const OneStepCocycle A = testsupport::separated_pair();
    // Symmetric generators make the norm bound sharp at every length; the
    // frozen upper values at n = 1..3 all equal log(3 + 2 sqrt 2).
    CHECK(beta_upper(A, 1) == doctest::Approx(log_growth).epsilon(1e-15));
    CHECK(beta_upper(A, 3) == doctest::Approx(log_growth).epsilon(1e-15));
    const ExponentBracket br = exponent_bracket(A, 8, 8);
    CHECK(br.lower == doctest::Approx(log_growth).epsilon(1e-14));
    CHECK(br.upper == doctest::Approx(log_growth).epsilon(1e-14));
    CHECK(std::abs(br.width()) <= 1e-15);
    CHECK(br.witness == Word({1}));
    // (2) ties (1) exactly by the swap symmetry.
    CHECK(br.co_witnesses.size() == 2);
    CHECK_THROWS_AS(exponent_bracket(A, 0, 4), InputError);
}

TEST_CASE("alpha estimate is certified above but only heuristic below") {
    const OneStepCocycle A = testsupport::separated_pair();
    const AlphaEstimate est = alpha_bounds(A, 6);
    // The alternating necklace minimizes the periodic exponent among all
    // periods <= 6 for this pair.
    CHECK(est.upper_certified == doctest::Approx(1.4436354751788103).epsilon(1e-12));
    CHECK(est.upper_witness == Word({1, 2}));
    CHECK(est.upper_certified <= log_growth);
    CHECK(est.n == 6);
    // The word-norm side is deliberately not a bound: min norms are not
    // supermultiplicative, and at this cutoff the scan in fact lands strictly
    // above the certified orbit value.  Freezing the crossing documents why
    // the pair is an estimate and not an enclosure.
    CHECK(est.lower_heuristic > est.upper_certified);
}

TEST_CASE("almost multiplicativity is exhaustive when asked and positive here") {
    const OneStepCocycle A = testsupport::separated_pair();
    const AlmostMultiplicativity am = almost_multiplicativity_constant(A, 4, 6);
    CHECK(am.exhaustive);
    CHECK(am.pairs_examined == 900);  // (2 + 4 + 8 + 16)^2 ordered pairs
    CHECK(am.kappa > 0.0);
    CHECK(am.kappa <= 1.0 + 1e-12);
    // kappa is scale invariant: doubling both generators changes norms but
    // not the ratio.
    const OneStepCocycle B({Mat2{10, 4, 4, 2}, Mat2{2, 4, 4, 10}});
    const AlmostMultiplicativity bm = almost_multiplicativity_constant(B, 4, 6);
    CHECK(bm.kappa == doctest::Approx(am.kappa).epsilon(1e-12));

    // Beyond the exhaustive cutoff the scan thins but stays deterministic.
    const AlmostMultiplicativity thin1 = almost_multiplicativity_constant(A, 8, 5, 500);
    const AlmostMultiplicativity thin2 = almost_multiplicativity_constant(A, 8, 5, 500);
    CHECK_FALSE(thin1.exhaustive);
    CHECK(thin1.pairs_examined <= 500);
    CHECK(thin1.kappa == thin2.kappa);
}

TEST_CASE("parallel product scans reduce identically to the serial ones") {
    const OneStepCocycle A = testsupport::golden_mean_pair();
    std::vector<Word> serial_words;
    std::vector<double> serial_norms;
    scan_word_products(A, 7, [&](const Word& w, const ScaledMat2& p) {
        serial_words.push_back(w);
        serial_norms.push_back(p.log_norm());
    });
    CHECK(serial_words.size() == enumerate_words(A.transitions, 7).size());
    CHECK(std::is_sorted(serial_words.begin(), serial_words.end()));

    // The lower bound scan reduces across worker partitions; its value must
    // not depend on THREADS.
    const double b1 = beta_lower(A, 7).value;
    ::setenv("THREADS", "3", 1);
    const double b3 = beta_lower(A, 7).value;
    ::unsetenv("THREADS");
    CHECK(b1 == b3);
    CHECK(worker_count() >= 1);
}
