#include <cmath>

#include "doctest.h"
#include "homsim/biphoton.hpp"
#include "oracles.hpp"

using namespace homsim;

namespace {

Eigen::VectorXcd unit(int dim, int k) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    v(k) = 1.0;
    return v;
}

double rate(const Eigen::MatrixXcd& U, const Eigen::VectorXcd& u,
            const Eigen::VectorXcd& v, const Eigen::VectorXcd& p,
            const Eigen::VectorXcd& q, double gamma) {
    return coincidence_rate(PairSetup{U, u, v, p, q, gamma});
}

// unordered coincidence over every projector pair of the computational basis
double total_rate(const Eigen::MatrixXcd& U, const Eigen::VectorXcd& u,
                  const Eigen::VectorXcd& v, double gamma) {
    const int d = static_cast<int>(U.rows());
    double sum = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) sum += rate(U, u, v, unit(d, i), unit(d, j), gamma);
    return sum;
}

}  // namespace

TEST_CASE("named unitaries are unitary and correctly shaped") {
    for (const char* name : {"u2", "u3", "rot3", "u4:0", "u4:1.5707963", "u4:3.14159"}) {
        const Eigen::MatrixXcd u = named_unitary(name);
        const double dev =
            (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols()))
                .cwiseAbs()
                .maxCoeff();
        CHECK(dev < 1e-12);
    }
    CHECK(named_unitary("u2").rows() == 2);
    CHECK(named_unitary("u3").rows() == 3);
    CHECK(named_unitary("rot3").rows() == 3);
    CHECK(named_unitary("u4:0.5").rows() == 4);
    CHECK_THROWS_AS(named_unitary("u4"), ConfigError);
    CHECK_THROWS_AS(named_unitary("u4:abc"), ConfigError);
    CHECK_THROWS_AS(named_unitary("u5"), ConfigError);
}

TEST_CASE("the balanced two-mode splitter shows the textbook dip and bump") {
    const Eigen::MatrixXcd u = u2();
    const auto e0 = unit(2, 0), e1 = unit(2, 1);

    // distinct outputs: perfect suppression at gamma = 1
    CHECK(rate(u, e0, e1, e0, e1, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(rate(u, e0, e1, e0, e1, 1.0) == 0.0);

    // same output: photon bunching doubles the classical value
    CHECK(rate(u, e0, e1, e0, e0, 0.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(rate(u, e0, e1, e0, e0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));

    CHECK(classify(0.5, 0.0) == InterferenceKind::dip);
    CHECK(classify(0.25, 0.5) == InterferenceKind::bump);
    CHECK(visibility(0.5, 0.0, InterferenceKind::dip) == doctest::Approx(1.0));
    CHECK(visibility(0.25, 0.5, InterferenceKind::bump) == doctest::Approx(1.0));
}

TEST_CASE("the splitter output is the two-photon NOON state") {
    const TwoPhotonState st = transform_pair(u2(), unit(2, 0), unit(2, 1));
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(st.amplitude(0, 0) - cplx(s, 0.0)) < 1e-14);
    CHECK(std::abs(st.amplitude(1, 1) - cplx(-s, 0.0)) < 1e-14);
    CHECK(std::abs(st.amplitude(0, 1)) < 1e-14);
    CHECK(st.probability(0, 0) == doctest::Approx(0.5));
    CHECK(st.probability(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("MUB projectors on the splitter relocate or erase the interference") {
    const Eigen::MatrixXcd u = u2();
    const Eigen::VectorXcd d = named_state("d", 2), a = named_state("a", 2);
    const Eigen::VectorXcd h = named_state("h", 2), v = named_state("v", 2);
    const auto e0 = unit(2, 0), e1 = unit(2, 1);

    // circular-type MUB projectors on basis-mode inputs: full dip
    CHECK(rate(u, e0, e1, d, a, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rate(u, e0, e1, d, a, 1.0) < 1e-15);

    // real MUB projectors: the splitter maps the inputs straight onto h and v,
    // so nothing mixes and the rate is flat in gamma
    const double hc = rate(u, e0, e1, h, v, 0.0);
    const double hq = rate(u, e0, e1, h, v, 1.0);
    CHECK(hc == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hc == doctest::Approx(hq).epsilon(1e-12));
    CHECK(classify(hc, hq) == InterferenceKind::none);

    // swapped roles: circular MUB inputs behind basis-mode projectors
    CHECK(rate(u, a, d, e0, e1, 1.0) < 1e-15);
    CHECK(rate(u, a, d, e0, e0, 1.0) ==
          doctest::Approx(2.0 * rate(u, a, d, e0, e0, 0.0)).epsilon(1e-12));

    // the circular states are eigenvectors of the splitter, so using them on
    // both sides gives a constant coincidence rate of one
    CHECK(rate(u, d, a, d, a, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rate(u, d, a, d, a, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("the three-mode multiport interferes every distinct pair at half depth") {
    const Eigen::MatrixXcd u = u3();
    const auto e0 = unit(3, 0), e2 = unit(3, 2);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double r0 = rate(u, e0, e2, unit(3, i), unit(3, j), 0.0);
            const double r1 = rate(u, e0, e2, unit(3, i), unit(3, j), 1.0);
            if (i == j) {
                // coalescence: doubled rate
                CHECK(r1 == doctest::Approx(2.0 * r0).epsilon(1e-12));
                CHECK(visibility(r0, r1, InterferenceKind::bump) ==
                      doctest::Approx(1.0).epsilon(1e-12));
            } else {
                // partial suppression with exactly half visibility
                CHECK(visibility(r0, r1, InterferenceKind::dip) ==
                      doctest::Approx(0.5).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("second-MUB states complete an orthonormal measurement basis") {
    const Eigen::MatrixXcd u = u3();
    const auto e0 = unit(3, 0), e2 = unit(3, 2);
    const Eigen::VectorXcd m2 = named_state("mub2_2", 3);
    const Eigen::VectorXcd m3 = named_state("mub2_3", 3);
    const Eigen::VectorXcd m1 = Eigen::Vector3cd::Constant(1.0 / std::sqrt(3.0));
    CHECK(std::abs(m2.dot(m3)) < 1e-12);
    CHECK(std::abs(m1.dot(m2)) < 1e-12);
    CHECK(std::abs(m1.dot(m3)) < 1e-12);

    // the basis contains the multiport's uniform column, so projections onto
    // the other two states of the same basis vanish
    CHECK(rate(u, e0, e2, m2, m3, 0.0) < 1e-15);
    CHECK(rate(u, e0, e2, m2, m3, 1.0) < 1e-15);

    // completeness holds in this rotated basis too
    const Eigen::VectorXcd basis[3] = {m1, m2, m3};
    for (double g : {0.0, 0.5, 1.0}) {
        double total = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) total += rate(u, e0, e2, basis[i], basis[j], g);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("the rotated multiport produces three-dimensional anti-coalescence") {
    const Eigen::MatrixXcd u = rot3();
    const auto e0 = unit(3, 0), e1 = unit(3, 1), e2 = unit(3, 2);

    // distinct-projector bump: the signature that is classically impossible
    CHECK(rate(u, e0, e2, e0, e2, 0.0) == doctest::Approx(0.125).epsilon(1e-10));
    CHECK(rate(u, e0, e2, e0, e2, 1.0) == doctest::Approx(0.25).epsilon(1e-10));

    // and a full dip on the neighbouring pair
    const double d0 = rate(u, e0, e2, e1, e2, 0.0);
    const double d1 = rate(u, e0, e2, e1, e2, 1.0);
    CHECK(d0 > 1e-6);
    CHECK(d1 < 1e-12);

    // the raw layout is the same operator conjugated by the (1 <-> 2) swap
    const Eigen::MatrixXcd raw = rot3(false);
    Eigen::PermutationMatrix<3> perm;
    perm.indices() << 0, 2, 1;
    const Eigen::MatrixXcd back = perm * raw * perm;
    CHECK((back - u).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("anti-coalescent superposition inputs behave like the rotated multiport") {
    // Sending the rotation's column states through the plain multiport is the
    // same physics as sending basis modes through the rotated multiport, up to
    // a relabeling of the output projectors.
    const Eigen::MatrixXcd u = u3();
    const Eigen::MatrixXcd r = rot3();
    const Eigen::VectorXcd a1 = named_state("a1", 3);
    const Eigen::VectorXcd a2 = named_state("a2", 3);
    CHECK(std::abs(a1.dot(a2)) < 1e-12);

    const auto e0 = unit(3, 0), e2 = unit(3, 2);
    const int m[3] = {2, 0, 1};  // projector label map between the two pictures
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            for (double g : {0.0, 0.5, 1.0}) {
                CHECK(rate(u, a1, a2, unit(3, i), unit(3, j), g) ==
                      doctest::Approx(rate(r, e0, e2, unit(3, m[i]), unit(3, m[j]), g))
                          .epsilon(1e-12));
            }
        }
    }

    // anti-coalescence signature: some distinct pair gains rate, some loses all
    bool saw_bump = false, saw_full_dip = false;
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            const double r0 = rate(u, a1, a2, unit(3, i), unit(3, j), 0.0);
            const double r1 = rate(u, a1, a2, unit(3, i), unit(3, j), 1.0);
            if (r1 > r0 + 1e-6) saw_bump = true;
            if (r0 > 1e-6 && r1 < 1e-10) saw_full_dip = true;
        }
    }
    CHECK(saw_bump);
    CHECK(saw_full_dip);
}

TEST_CASE("the tunable four-mode splitter sweeps dip, flat, and bump") {
    const auto e0 = unit(4, 0), e3 = unit(4, 3);
    auto r = [&](double phi, double gamma) {
        return rate(u4(phi), e0, e3, e0, e3, gamma);
    };
    // rate model: (2 + 2 gamma cos phi) / 16
    for (double phi : {0.0, pi / 2, pi, 1.234}) {
        for (double gamma : {0.0, 0.3, 1.0}) {
            CHECK(r(phi, gamma) ==
                  doctest::Approx((2.0 + 2.0 * gamma * std::cos(phi)) / 16.0)
                      .epsilon(1e-12));
        }
    }
    CHECK(classify(r(0.0, 0.0), r(0.0, 1.0)) == InterferenceKind::bump);
    CHECK(classify(r(pi / 2, 0.0), r(pi / 2, 1.0)) == InterferenceKind::none);
    CHECK(classify(r(pi, 0.0), r(pi, 1.0)) == InterferenceKind::dip);
}

TEST_CASE("unordered detection probabilities sum to one at every gamma") {
    Rng rng(11);
    for (int d : {2, 3, 4}) {
        const Eigen::MatrixXcd u = oracles::haar_unitary(d, rng);
        // random orthonormal input pair: two columns of a Haar unitary
        const Eigen::MatrixXcd w = oracles::haar_unitary(d, rng);
        for (double gamma : {0.0, 0.25, 0.7, 1.0}) {
            CHECK(total_rate(u, w.col(0), w.col(1), gamma) ==
                  doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("rates agree with the internal-degree-of-freedom oracle") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 2 + static_cast<int>(rng.uniform() * 3.0);
        const Eigen::MatrixXcd u = oracles::haar_unitary(d, rng);
        const Eigen::MatrixXcd in = oracles::haar_unitary(d, rng);
        const Eigen::MatrixXcd pr = oracles::haar_unitary(d, rng);
        const double gamma = rng.uniform();
        const bool same = trial % 3 == 0;
        const Eigen::VectorXcd p = pr.col(0);
        const Eigen::VectorXcd q = same ? Eigen::VectorXcd(pr.col(0)) : Eigen::VectorXcd(pr.col(1));
        const double got = rate(u, in.col(0), in.col(1), p, q, gamma);
        const double want = oracles::coincidence_rate(u, in.col(0), in.col(1), p, q, gamma);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("transform_pair matches the rate algebra for indistinguishable pairs") {
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 2 + static_cast<int>(rng.uniform() * 3.0);
        const Eigen::MatrixXcd u = oracles::haar_unitary(d, rng);
        const Eigen::MatrixXcd in = oracles::haar_unitary(d, rng);
        const TwoPhotonState st = transform_pair(u, in.col(0), in.col(1));
        double total = 0.0;
        for (int i = 0; i < d; ++i) {
            for (int j = i; j < d; ++j) {
                const double r = rate(u, in.col(0), in.col(1), unit(d, i), unit(d, j), 1.0);
                CHECK(st.probability(i, j) == doctest::Approx(r).epsilon(1e-10));
                total += st.probability(i, j);
            }
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("rate is affine in gamma") {
    Rng rng(5);
    const Eigen::MatrixXcd u = oracles::haar_unitary(3, rng);
    const Eigen::MatrixXcd in = oracles::haar_unitary(3, rng);
    const Eigen::MatrixXcd pr = oracles::haar_unitary(3, rng);
    const double r0 = rate(u, in.col(0), in.col(1), pr.col(0), pr.col(1), 0.0);
    const double r1 = rate(u, in.col(0), in.col(1), pr.col(0), pr.col(1), 1.0);
    for (double g : {-0.8, -0.2, 0.4, 0.9}) {
        CHECK(rate(u, in.col(0), in.col(1), pr.col(0), pr.col(1), g) ==
              doctest::Approx(r0 + g * (r1 - r0)).epsilon(1e-12));
    }
}

TEST_CASE("setup validation") {
    const Eigen::MatrixXcd u = u2();
    const auto e0 = unit(2, 0), e1 = unit(2, 1);
    Eigen::VectorXcd notunit(2);
    notunit << 1.0, 1.0;
    CHECK_THROWS_AS(rate(u, notunit, e1, e0, e1, 1.0), ConfigError);
    CHECK_THROWS_AS(rate(u, e0, e1, e0, e1, 1.5), ConfigError);
    CHECK_THROWS_AS(rate(u, e0, e1, e0, e1, -1.5), ConfigError);

    // projectors neither identical nor orthogonal
    Eigen::VectorXcd tilted(2);
    tilted << std::sqrt(0.9), std::sqrt(0.1);
    CHECK_THROWS_AS(rate(u, e0, e1, e0, tilted, 1.0), ConfigError);

    Eigen::VectorXcd wrongdim = Eigen::VectorXcd::Zero(3);
    wrongdim(0) = 1.0;
    CHECK_THROWS_AS(rate(u, wrongdim, e1, e0, e1, 1.0), ConfigError);

    CHECK_THROWS_AS(visibility(0.0, 1.0, InterferenceKind::dip), ConfigError);
    CHECK_THROWS_AS(named_state("nope", 2), ConfigError);
    CHECK_THROWS_AS(named_state("d", 3), ConfigError);
}
