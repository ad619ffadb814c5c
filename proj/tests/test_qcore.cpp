// Copyright 2026 The chronoscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "chronoscope/qcore.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

using namespace chronoscope;

namespace {

Mat brute_partial_trace(const Vec& psi, int n, const std::vector<Site>& keep) {
  const int k = static_cast<int>(keep.size());
  Mat rho = Mat::Zero(Eigen::Index{1} << k, Eigen::Index{1} << k);
  for (std::uint64_t i = 0; i < (1ULL << n); ++i) {
    for (std::uint64_t j = 0; j < (1ULL << n); ++j) {
      bool same_rest = true;
      for (Site s = 0; s < n; ++s) {
        if (std::find(keep.begin(), keep.end(), s) != keep.end()) continue;
        if (((i >> (n - 1 - s)) & 1U) != ((j >> (n - 1 - s)) & 1U)) same_rest = false;
      }
      if (!same_rest) continue;
      std::uint64_t ri = 0, rj = 0;
      for (Site s : keep) {
        ri = (ri << 1) | ((i >> (n - 1 - s)) & 1U);
        rj = (rj << 1) | ((j >> (n - 1 - s)) & 1U);
      }
      rho(static_cast<Eigen::Index>(ri), static_cast<Eigen::Index>(rj)) +=
          psi[static_cast<Eigen::Index>(i)] * std::conj(psi[static_cast<Eigen::Index>(j)]);
    }
  }
  return rho;
}

}  // namespace

TEST(PartialTrace, ProductAndBell) {
  const auto r0 = partial_trace(StateVector::product("00"), {0});
  EXPECT_NEAR(std::abs(r0.matrix()(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(r0.matrix().norm(), 1.0, 1e-15);

  Vec bell = Vec::Zero(4);
  bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
  const auto rb = partial_trace(StateVector(2, bell), {0});
  EXPECT_NEAR((rb.matrix() - Mat::Identity(2, 2) / 2.0).norm(), 0.0, 1e-15);
}

TEST(PartialTrace, MatchesIndexLoop) {
  Rng rng(11);
  const auto psi = StateVector::random(4, rng);
  const auto r = partial_trace(psi, {1, 3});
  EXPECT_LT((r.matrix() - brute_partial_trace(psi.amplitudes(), 4, {1, 3})).norm(), 1e-14);
  const auto r2 = partial_trace(psi, {3, 1});
  EXPECT_LT((r2.matrix() - brute_partial_trace(psi.amplitudes(), 4, {3, 1})).norm(), 1e-14);
}

TEST(PartialTrace, Consistency) {
  Rng rng(5);
  const auto psi = StateVector::random(5, rng);
  const auto r_bc = partial_trace(psi, {0, 2});
  // tracing {1,3,4} then {2} equals tracing {1,2,3,4}
  const Site keep0[1] = {0};
  const Mat nested = partial_trace_operator(r_bc.matrix(), 2, keep0);
  const Mat direct = partial_trace(psi, {0}).matrix();
  EXPECT_LT((nested - direct).norm(), 1e-12);
}

TEST(PartialTrace, Errors) {
  const auto s = StateVector::product("000");
  EXPECT_THROW(partial_trace(s, {3}), QcoreError);
  EXPECT_THROW(partial_trace(s, {1, 1}), QcoreError);
}

TEST(Schmidt, ProductBellRandom) {
  const auto sp = schmidt_split(StateVector::product("0+1"), 0);
  EXPECT_NEAR(sp.p1, 1.0, 1e-15);
  EXPECT_NEAR(sp.p2, 0.0, 1e-15);
  EXPECT_EQ(sp.rank, 1);

  Vec bell = Vec::Zero(4);
  bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
  const auto sb = schmidt_split(StateVector(2, bell), 1);
  EXPECT_NEAR(sb.p1, 0.5, 1e-14);
  EXPECT_NEAR(sb.p2, 0.5, 1e-14);
  EXPECT_TRUE(sb.degenerate);

  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto psi = StateVector::random(6, rng);
    for (Site q = 0; q < 6; ++q) {
      const auto s = schmidt_split(psi, q);
      EXPECT_GE(s.p1, s.p2);
      EXPECT_LT((s.reconstruct(6).amplitudes() - psi.amplitudes()).norm(), 1e-10);
      EXPECT_LT(std::abs(s.phi1.dot(s.phi2)), 1e-10);
      EXPECT_LT(std::abs(s.psi1.dot(s.psi2)), 1e-10);
      Eigen::SelfAdjointEigenSolver<Mat> es(partial_trace(psi, {q}).matrix());
      EXPECT_NEAR(s.p1, es.eigenvalues()[1], 1e-12);
      EXPECT_NEAR(s.p2, es.eigenvalues()[0], 1e-12);
    }
  }
}

TEST(Schmidt, RankOneReconstruction) {
  const auto psi = StateVector::product("+0r");
  for (Site q = 0; q < 3; ++q) {
    const auto s = schmidt_split(psi, q);
    EXPECT_LT((s.reconstruct(3).amplitudes() - psi.amplitudes()).norm(), 1e-12);
    EXPECT_LT(std::abs(s.phi1.dot(s.phi2)), 1e-12);
    EXPECT_NEAR(s.phi2.norm(), 1.0, 1e-12);
  }
}

TEST(Entropy, Renyi2) {
  Mat pure = Mat::Zero(2, 2);
  pure(0, 0) = 1.0;
  EXPECT_NEAR(renyi2_entropy(DenseOperator({0}, pure)), 0.0, 1e-15);
  EXPECT_NEAR(renyi2_entropy(DenseOperator({0}, Mat::Identity(2, 2) / 2.0)), std::log(2.0), 1e-15);
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 0.75;
  d(1, 1) = 0.25;
  EXPECT_NEAR(renyi2_entropy(DenseOperator({0}, d)), -std::log(10.0 / 16.0), 1e-15);
  EXPECT_NEAR(purity(DenseOperator({0}, d)), 10.0 / 16.0, 1e-15);
  EXPECT_NEAR(von_neumann_entropy(DenseOperator({0}, Mat::Identity(2, 2) / 2.0)), std::log(2.0), 1e-14);
  EXPECT_THROW(renyi2_entropy(DenseOperator({0}, Mat::Identity(2, 2))), QcoreError);
}

TEST(HsInner, PauliOrthonormality) {
  const Mat X = pauli_matrix(Pauli::X);
  const Mat Y = pauli_matrix(Pauli::Y);
  EXPECT_NEAR(std::abs(hs_inner(X, X) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(hs_inner(X, Y)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(hs_inner(Mat(Mat::Identity(2, 2)), Mat(Mat::Identity(2, 2))) - 1.0), 0.0, 1e-15);
  const Mat xz = PauliString::from_string("XZ").dense();
  EXPECT_EQ(hs_inner(xz, xz), cplx(1.0));
  for (int n = 1; n <= 3; ++n) {
    const int count = 1 << (2 * n);
    std::vector<Mat> basis;
    for (int code = 0; code < count; ++code) {
      PauliString p(n);
      int c = code;
      for (Site s = n - 1; s >= 0; --s) {
        p.set(s, static_cast<Pauli>(c & 3));
        c >>= 2;
      }
      basis.push_back(p.dense());
    }
    for (int a = 0; a < count; ++a) {
      for (int b = 0; b < count; ++b) {
        EXPECT_EQ(hs_inner(basis[static_cast<std::size_t>(a)], basis[static_cast<std::size_t>(b)]),
                  cplx(a == b ? 1.0 : 0.0));
      }
    }
  }
  EXPECT_THROW(hs_inner(X, Mat(Mat::Identity(4, 4))), QcoreError);
}

TEST(PauliString, GroupClosureTwoSites) {
  std::vector<PauliString> all;
  for (int code = 0; code < 16; ++code) {
    for (int ph = 0; ph < 4; ++ph) {
      PauliString p(2);
      p.set(0, static_cast<Pauli>(code >> 2));
      p.set(1, static_cast<Pauli>(code & 3));
      all.push_back(p.with_phase(ph));
    }
  }
  for (const auto& a : all) {
    for (const auto& b : all) {
      const Mat prod = a.dense() * b.dense();
      EXPECT_LT(((a * b).dense() - prod).norm(), 1e-14) << a.to_string() << " * " << b.to_string();
      const bool comm = (a.dense() * b.dense() - b.dense() * a.dense()).norm() < 1e-12;
      EXPECT_EQ(a.commutes_with(b), comm);
    }
  }
}

TEST(PauliString, SingleSiteTable) {
  const auto x = PauliString::from_string("X");
  const auto y = PauliString::from_string("Y");
  const auto z = PauliString::from_string("Z");
  EXPECT_EQ(x * y, z.with_phase(1));
  EXPECT_EQ(y * x, z.with_phase(3));
  EXPECT_EQ(z * x, y.with_phase(1));
  EXPECT_EQ(x * x, PauliString(1));
}

TEST(PauliString, ApplyMatchesDense) {
  Rng rng(7);
  const auto psi = StateVector::random(3, rng);
  const auto p = PauliString::from_string("YXZ", 3);
  EXPECT_LT((p.apply(psi.amplitudes()) - p.dense() * psi.amplitudes()).norm(), 1e-14);
  EXPECT_EQ(p.support(), (std::vector<Site>{0, 1, 2}));
  EXPECT_EQ(p.weight(), 3);
}

TEST(PauliSum, DenseRoundTrip) {
  Rng rng(9);
  Mat m(4, 4);
  for (int c = 0; c < 4; ++c) m.col(c) = random_gaussian_vector(4, rng);
  const auto s = PauliSum::from_dense(m, 2);
  EXPECT_LT((s.dense() - m).norm(), 1e-13);
}

TEST(ProjectNontrivial, Examples) {
  const Site s0[1] = {0};
  const auto one_x = PauliSum::from(PauliString::from_string("IX"));
  EXPECT_TRUE(project_nontrivial(one_x, s0).empty());
  const auto sum = PauliSum::from(PauliString::from_string("XI")) + PauliSum::from(PauliString::from_string("IZ"));
  const auto proj = project_nontrivial(sum, s0);
  ASSERT_EQ(proj.terms().size(), 1U);
  EXPECT_EQ(proj.terms()[0].string.to_string(), "+XI");
}

TEST(ProjectNontrivial, Idempotent) {
  Rng rng(21);
  std::uniform_int_distribution<int> letter(0, 3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    PauliSum s(4);
    for (int k = 0; k < 10; ++k) {
      PauliString p(4);
      for (Site q = 0; q < 4; ++q) p.set(q, static_cast<Pauli>(letter(rng)));
      s.add(cplx(g(rng), g(rng)), p);
    }
    const Site S[2] = {1, 3};
    const auto once = project_nontrivial(s, S);
    const auto twice = project_nontrivial(once, S);
    EXPECT_LT((once.dense() - twice.dense()).norm(), 1e-14);
  }
}

TEST(Haar, UnitaryAndMoment) {
  Rng rng(1);
  double m4 = 0.0;
  const int n = 40000;
  for (int k = 0; k < n; ++k) {
    const Mat u = haar_unitary(2, rng);
    if (k < 10) {
      EXPECT_LT((u.adjoint() * u - Mat::Identity(2, 2)).norm(), 1e-13);
    }
    m4 += std::pow(std::abs(u(0, 0)), 4);
  }
  EXPECT_NEAR(m4 / n, 1.0 / 3.0, 0.01);
}

TEST(HsDensity, UnitTracePsd) {
  Rng rng(2);
  for (int k = 0; k < 10; ++k) {
    const Mat r = hs_random_density(4, rng);
    EXPECT_NEAR(r.trace().real(), 1.0, 1e-13);
    Eigen::SelfAdjointEigenSolver<Mat> es(r);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-14);
  }
}

TEST(StateVector, Invariants) {
  EXPECT_THROW(StateVector(3, Vec::Zero(7)), QcoreError);
  EXPECT_THROW(StateVector::product("0a"), QcoreError);
  const auto s = StateVector::product("+-rl");
  EXPECT_TRUE(s.is_normalized());
  EXPECT_EQ(s.dim(), 16U);
}
