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

#include "chronoscope/qec.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

using namespace chronoscope;

namespace {

Vec logical_with_z(double z) {
  const double th = std::acos(z);
  Vec l(2);
  l << std::cos(th / 2), std::sin(th / 2);
  return l;
}

std::vector<PauliString> logical_paulis(const StabilizerCode& code) {
  std::vector<PauliString> out;
  for (int j = 0; j < code.k(); ++j) {
    for (Pauli a : kNontrivial) out.push_back(code.logical(a, j));
  }
  if (code.k() > 1) out.push_back(code.logical(Pauli::X, 0) * code.logical(Pauli::Z, 1));
  return out;
}

}  // namespace

TEST(Codes, Invariants) {
  for (int k : {1, 2, 3}) {
    const auto c = five_qubit_blocks(k);
    EXPECT_EQ(c.n_qubits(), 5 * k);
    EXPECT_EQ(c.n_generators(), 4 * k);
    EXPECT_TRUE(c.corrects_single_qubit_errors());
  }
  const auto f = five_qubit_blocks(2);
  EXPECT_EQ(f.generators()[0].to_string(), "+XZZXIIIIII");
  EXPECT_EQ(f.generators()[7].to_string(), "+IIIIIZXIXZ");
  EXPECT_EQ(f.logical_x(1).to_string(), "+IIIIIXIYYI");
  EXPECT_THROW(five_qubit_blocks(4), QecError);

  const auto ice = iceberg(4);
  EXPECT_EQ(ice.n_qubits(), 6);
  EXPECT_EQ(ice.logical_x(2).to_string(), "+IIXIXI");
  EXPECT_EQ(ice.logical_z(2).to_string(), "+IIZIIZ");
  EXPECT_FALSE(ice.corrects());
  EXPECT_THROW(iceberg(3), QecError);
  EXPECT_THROW(RecoveryChannel{ice}, QecError);

  const auto rep = repetition_x(3);
  EXPECT_FALSE(rep.corrects_single_qubit_errors());
  EXPECT_EQ(rep.logical_z(0).to_string(), "+XXX");
}

TEST(Codes, ThreeSiteZRepresentative) {
  // Z on the first site with Y on the next two anticommutes with XZZXI.
  const auto c = five_qubit_blocks(1);
  EXPECT_FALSE(c.is_logical(PauliString::from_string("ZYYII")));
  EXPECT_TRUE(c.is_logical(c.logical_z(0)));
  EXPECT_EQ(c.logical_z(0).weight(), 3);
  // Equal to ZZZZZ up to sign on the codespace.
  const Mat& E = c.encoder();
  const Mat m = E.adjoint() * PauliString::from_string("ZZZZZ").dense() * E;
  const Mat l = E.adjoint() * c.logical_z(0).dense() * E;
  EXPECT_LT((m + l).norm(), 1e-12);
}

TEST(Codes, EncoderSpansCodespace) {
  for (const auto& c : {five_qubit_blocks(2), repetition_x(3), iceberg(2)}) {
    const Mat& E = c.encoder();
    EXPECT_LT((E.adjoint() * E - Mat::Identity(E.cols(), E.cols())).norm(), 1e-12);
    for (Eigen::Index b = 0; b < E.cols(); ++b) {
      const Vec v = E.col(b);
      for (const auto& g : c.generators()) EXPECT_LT((g.apply(v) - v).norm(), 1e-12);
      for (int j = 0; j < c.k(); ++j) {
        const double sign = ((b >> (c.k() - 1 - j)) & 1) ? -1.0 : 1.0;
        EXPECT_LT((c.logical_z(j).apply(v) - sign * v).norm(), 1e-12);
      }
    }
  }
  const auto rep = repetition_x(3);
  EXPECT_LT((rep.encoder().col(0) - StateVector::product("+++").amplitudes()).norm(), 1e-12);
  EXPECT_LT((rep.encoder().col(1) - StateVector::product("---").amplitudes()).norm(), 1e-12);
}

TEST(Codes, DecodingTables) {
  const auto f = five_qubit_blocks(1);
  std::vector<int> hits(16, 0);
  ++hits[0];
  for (Site s = 0; s < 5; ++s) {
    for (Pauli p : kNontrivial) ++hits[f.syndrome_of(PauliString::single(5, s, p))];
  }
  for (int h : hits) EXPECT_EQ(h, 1);

  const auto rep = repetition_x(3);
  for (std::uint64_t s = 1; s < 4; ++s) {
    const auto e = rep.error_for(s);
    EXPECT_EQ(e.weight(), 1);
    EXPECT_EQ(e.letter(e.support()[0]), Pauli::Z);
  }
  const auto rep5 = repetition_x(5);
  for (std::uint64_t s = 0; s < rep5.n_syndromes(); ++s) {
    EXPECT_EQ(rep5.syndrome_of(rep5.error_for(s)), s);
    EXPECT_LE(rep5.error_for(s).weight(), 2);
  }
}

TEST(Recovery, TracePreservingAndChoiPositive) {
  Rng rng(31);
  for (const auto& c : {five_qubit_blocks(1), repetition_x(3)}) {
    const RecoveryChannel R(c);
    const auto dim = static_cast<Eigen::Index>(c.encoder().rows());
    for (int trial = 0; trial < 3; ++trial) {
      const Mat rho = hs_random_density(static_cast<int>(dim), rng);
      const Mat out = R.apply(rho);
      EXPECT_NEAR(out.trace().real(), 1.0, 1e-12);
      EXPECT_LT((out - out.adjoint()).norm(), 1e-12);
    }
    Mat choi = Mat::Zero(dim * dim, dim * dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = 0; j < dim; ++j) {
        Mat e = Mat::Zero(dim, dim);
        e(i, j) = 1.0;
        choi.block(i * dim, j * dim, dim, dim) = R.apply(e);
      }
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(choi);
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(Recovery, SyndromeProjectorsPartitionUnity) {
  const auto c = five_qubit_blocks(1);
  const Mat& E = c.encoder();
  const Mat P0 = E * E.adjoint();
  Mat sum = Mat::Zero(P0.rows(), P0.cols());
  for (std::uint64_t s = 0; s < c.n_syndromes(); ++s) {
    const Mat Es = c.error_for(s).dense();
    const Mat Ps = Es * P0 * Es.adjoint();
    for (Eigen::Index col = 0; col < 4; ++col) {
      const Vec v = Vec::Unit(32, col * 7);
      EXPECT_LT((Ps * v - c.project_syndrome(s, v)).norm(), 1e-12);
    }
    sum += Ps;
  }
  EXPECT_LT((sum - Mat::Identity(32, 32)).norm(), 1e-12);
}

TEST(Recovery, UndoesSingleQubitErrors) {
  Rng rng(32);
  for (int k : {1, 2}) {
    const auto c = five_qubit_blocks(k);
    const RecoveryChannel R(c);
    const Mat rl = hs_random_density(c.logical_dim(), rng);
    const Mat& E = c.encoder();
    const Mat rho = E * rl * E.adjoint();
    for (Site s = 0; s < c.n_qubits(); ++s) {
      for (Pauli p : kNontrivial) {
        const auto P = PauliString::single(c.n_qubits(), s, p);
        Mat PE(E.rows(), E.cols());
        for (Eigen::Index col = 0; col < E.cols(); ++col) PE.col(col) = P.apply(Vec(E.col(col)));
        if (k == 1) {
          EXPECT_LT((R.apply(PE * rl * PE.adjoint()) - rho).norm(), 1e-12);
          continue;
        }
        // Decoded output of R[P |a><b| P] is |a><b|.
        for (Eigen::Index a = 0; a < E.cols(); ++a) {
          for (Eigen::Index b = 0; b < E.cols(); ++b) {
            Mat expect = Mat::Zero(E.cols(), E.cols());
            expect(a, b) = 1.0;
            EXPECT_LT((R.logical_output(PE.col(a), PE.col(b)) - expect).norm(), 1e-12);
          }
        }
      }
    }
  }
}

TEST(Adjoint, LogicalIdentity) {
  const auto c = five_qubit_blocks(2);
  for (auto form : {AdjointForm::kDefinition, AdjointForm::kSimplified}) {
    const auto r = recovery_adjoint(c, PauliString(c.n_qubits()), form);
    ASSERT_EQ(r.terms().size(), 1U);
    EXPECT_TRUE(r.terms()[0].string.is_identity());
    EXPECT_NEAR(std::abs(r.terms()[0].coef - 1.0), 0.0, 1e-14);
  }
}

TEST(Adjoint, FormsAgreeWithDenseChannel) {
  Rng rng(33);
  for (const auto& c : {five_qubit_blocks(1), five_qubit_blocks(2), repetition_x(3), repetition_x(5)}) {
    const RecoveryChannel R(c);
    const int dim = 1 << c.n_qubits();
    const Mat rho = hs_random_density(dim, rng);
    const Mat out = R.apply(rho);
    for (const auto& O : logical_paulis(c)) {
      const Mat def = recovery_adjoint(c, O, AdjointForm::kDefinition).dense();
      const Mat simp = recovery_adjoint(c, O, AdjointForm::kSimplified).dense();
      EXPECT_LT((def - simp).norm(), 1e-12) << c.name() << " " << O.to_string();
      const cplx schr = O.dense().transpose().cwiseProduct(out).sum();
      const cplx heis = def.transpose().cwiseProduct(rho).sum();
      EXPECT_LT(std::abs(schr - heis), 1e-12) << c.name() << " " << O.to_string();
    }
  }
}

TEST(Adjoint, RepetitionLogicalZ) {
  // Zbar = XXX anticommutes with exactly the three single-site Z corrections.
  const auto c = repetition_x(3);
  const PauliString zbar = c.logical_z(0);
  Mat anti = Mat::Zero(8, 8);
  int count = 0;
  for (std::uint64_t s = 0; s < c.n_syndromes(); ++s) {
    if (c.error_for(s).commutes_with(zbar)) continue;
    ++count;
    EXPECT_EQ(c.error_for(s).letter(c.error_for(s).support()[0]), Pauli::Z);
    for (Eigen::Index col = 0; col < 8; ++col) anti.col(col) = anti.col(col) + c.project_syndrome(s, Vec::Unit(8, col));
  }
  EXPECT_EQ(count, 3);
  const Mat expect = zbar.dense() * (Mat::Identity(8, 8) - 2.0 * anti);
  EXPECT_LT((recovery_adjoint(c, zbar).dense() - expect).norm(), 1e-12);
}

TEST(Adjoint, FiveQubitOnCodespace) {
  const auto c = five_qubit_blocks(1);
  const Mat P0 = c.encoder() * c.encoder().adjoint();
  const Mat X = c.logical_x(0).dense();
  const Mat r = recovery_adjoint(c, c.logical_x(0)).dense();
  EXPECT_LT((P0 * r * P0 - X * P0).norm(), 1e-12);
  EXPECT_LT((r * P0 - X * P0).norm(), 1e-12);
}

TEST(Adjoint, RejectsNonLogical) {
  const auto c = five_qubit_blocks(1);
  EXPECT_THROW(recovery_adjoint(c, PauliString::single(5, 0, Pauli::X)), QecError);
  EXPECT_THROW(recovery_adjoint(iceberg(2), iceberg(2).logical_x(0)), QecError);
}

TEST(Eci, GoldenValues) {
  Rng rng(34);
  for (int k : {1, 2}) {
    const auto c = five_qubit_blocks(k);
    const RecoveryChannel R(c);
    const auto psi = c.encode(StateVector::random(k, rng).amplitudes());
    const int D = c.logical_dim();
    const int D_anc = static_cast<int>(c.n_syndromes());
    for (bool measured : {false, true}) {
      EciRequest req;
      req.measured = measured;
      req.pair = ChannelPair::kLogicalLogical;
      const auto ll = eci_exact(R, psi, req);
      EXPECT_NEAR(ll.value, k == 1 ? 1.0 / 20.0 : 3.0 / 272.0, 1e-12);
      EXPECT_NEAR(ll.closed_form, ci_logical_logical(D), 1e-15);
      req.pair = ChannelPair::kPhysicalLogical;
      for (Site q : {0, c.n_qubits() - 1}) {
        req.source_site = q;
        EXPECT_NEAR(eci_exact(R, psi, req).value, 0.0, 1e-12);
        req.pair = ChannelPair::kPhysicalAncilla;
        const auto pa = eci_exact(R, psi, req);
        EXPECT_NEAR(pa.value, ci_phys_anc_closed_form(D_anc, measured), 1e-12);
        req.fast_path = true;
        EXPECT_NEAR(eci_exact(R, psi, req).value, pa.value, 1e-14);
        req.fast_path = false;
        req.pair = ChannelPair::kPhysicalLogical;
      }
      if (k == 1) {
        req.pair = ChannelPair::kLogicalAncilla;
        EXPECT_NEAR(eci_exact(R, psi, req).value, 0.0, 1e-12);
      }
    }
  }
  EXPECT_NEAR(ci_phys_anc_closed_form(16, false), 1.8240e-4, 1e-8);
  EXPECT_NEAR(ci_phys_anc_closed_form(16, true), 6.0798e-5, 1e-9);
}

TEST(Eci, PhysAncPostBelowPre) {
  const auto c = five_qubit_blocks(1);
  const auto psi = c.encode(Vec::Unit(2, 0));
  const auto pre = ci_phys_anc(c, psi, false);
  const auto post = ci_phys_anc(c, psi, true);
  EXPECT_LT(post.value, pre.value);
  EXPECT_NEAR(pre.value, pre.closed_form, 1e-12);
  EXPECT_NEAR(post.value, post.closed_form, 1e-12);
}

TEST(Eci, RepetitionFormulas) {
  const auto c = repetition_x(3);
  const RecoveryChannel R(c);
  for (double z : {0.0, 0.5, 1.0}) {
    const auto psi = c.encode(logical_with_z(z));
    const auto expect = rep_code_ci(z);
    for (Site q = 0; q < 3; ++q) {
      EciRequest req;
      req.source_site = q;
      req.pair = ChannelPair::kPhysicalLogical;
      EXPECT_NEAR(eci_exact(R, psi, req).value, expect.phys_logical, 1e-12);
      req.pair = ChannelPair::kPhysicalAncilla;
      EXPECT_NEAR(eci_exact(R, psi, req).value, expect.phys_anc_pre, 1e-12);
      req.measured = true;
      EXPECT_NEAR(eci_exact(R, psi, req).value, expect.phys_anc_post, 1e-12);
    }
    EXPECT_NEAR(ci_phys_anc(c, psi, true).closed_form, 1.0 / 408.0, 1e-15);
  }
  EXPECT_NEAR(rep_code_ci(0.0).phys_logical, 1.0 / 30.0, 1e-15);
  EXPECT_EQ(rep_code_ci(1.0).phys_logical, 0.0);
}

TEST(Eci, HeisenbergRouteMatchesDense) {
  const auto c = five_qubit_blocks(2);
  const RecoveryChannel R(c);
  Rng rng(35);
  const auto psi = c.encode(StateVector::random(2, rng).amplitudes());
  const Propagator U(logical_xx_hamiltonian(c, 0.3));
  for (double tau : {0.0, 0.3, -0.7}) {
    for (Site q : {1, 7}) {
      for (int j : {0, 1}) {
        EciRequest req;
        req.source_site = q;
        req.logical_target = {j};
        const double dense = eci_exact(R, psi, req, &U, tau).value;
        const double heis = eci_heisenberg(c, psi, q, j, U, tau).value;
        EXPECT_NEAR(dense, heis, 1e-12);
        EXPECT_GT(heis, -1e-12);
      }
    }
  }
}

TEST(Eci, MonteCarloAgrees) {
  const auto c = five_qubit_blocks(1);
  const RecoveryChannel R(c);
  const auto psi = c.encode(Vec::Unit(2, 0));
  EciRequest req;
  req.pair = ChannelPair::kPhysicalAncilla;
  req.fast_path = true;
  const auto resp = eci_response(R, psi, req);
  const auto mc = resp.ci_monte_carlo(20000, 9);
  EXPECT_NEAR(mc.value, resp.ci_exact(), 4.0 * mc.std_error);
}

TEST(Eci, RejectsStatesOutsideCodespace) {
  const auto c = five_qubit_blocks(1);
  const RecoveryChannel R(c);
  const auto bad = StateVector::product("00000");
  EXPECT_THROW(eci_exact(R, bad, EciRequest{}), QecError);
  const Propagator U(logical_xx_hamiltonian(c));
  EXPECT_THROW(eci_heisenberg(c, bad, 0, 0, U, 0.1), QecError);
}

TEST(Protected, FamiliesVanish) {
  const auto c3 = five_qubit_blocks(3);
  for (auto f : {ProtectedFamily::kZEigen, ProtectedFamily::kXEigen, ProtectedFamily::kBell,
                 ProtectedFamily::kOneParameter}) {
    const auto r = check_protected(c3, f, 0.3);
    EXPECT_LE(r.eci, 1e-10) << to_string(f);
    EXPECT_TRUE(r.report.verdict) << to_string(f);
  }
  const auto c2 = five_qubit_blocks(2);
  for (auto f : {ProtectedFamily::kZEigen, ProtectedFamily::kXEigen}) {
    EXPECT_LE(check_protected(c2, f, 0.3).eci, 1e-10);
  }
  EXPECT_THROW(check_protected(c2, ProtectedFamily::kBell, 0.3), QecError);
  for (const auto* c : {&c2, &c3}) {
    const auto g = check_protected(*c, ProtectedFamily::kGeneric, 0.3);
    EXPECT_GT(g.eci, 1e-5);
    EXPECT_FALSE(g.report.verdict);
    EXPECT_NEAR(g.report.implied_ci, g.eci, 1e-12);
  }
}

TEST(Protected, HalfPeriodProtectsEverything) {
  const auto c = five_qubit_blocks(3);
  const auto g = check_protected(c, ProtectedFamily::kGeneric, std::numbers::pi / 2);
  EXPECT_LE(g.eci, 1e-10);
  EXPECT_TRUE(g.report.verdict);
}

TEST(Protected, PerturbedStatesFail) {
  const auto c = five_qubit_blocks(3);
  const Propagator U(logical_xx_hamiltonian(c));
  const double t = 0.3;
  // One-parameter family evaluated at the wrong time, and a tilted Bell pair.
  Vec wrong = protected_logical_state(ProtectedFamily::kOneParameter, 3, -t);
  Vec tilted = protected_logical_state(ProtectedFamily::kBell, 3, t);
  tilted[0] *= 1.2;
  tilted.normalize();
  for (const Vec& l : {wrong, tilted}) {
    const auto psi = c.encode(l);
    EXPECT_GT(eci_heisenberg(c, psi, 0, 1, U, t).value, 1e-6);
    EXPECT_FALSE(eci_theorem_check(c, psi, 0, 1, U, t).verdict);
  }
}

TEST(Protected, BellDenseCrossCheck) {
  // Dense recovery channel on 15 qubits, physical qubit 0 to logical qubit 1.
  const auto c = five_qubit_blocks(3);
  const RecoveryChannel R(c);
  const auto psi = c.encode(protected_logical_state(ProtectedFamily::kBell, 3, 0.3));
  const Propagator U(logical_xx_hamiltonian(c));
  EciRequest req;
  req.source_site = 0;
  req.logical_target = {1};
  EXPECT_LE(std::abs(eci_exact(R, psi, req, &U, 0.3).value), 1e-10);
}

TEST(Iceberg, SelfInfluence) {
  for (double dt : {0.05, 0.1, 0.3}) {
    for (std::uint64_t b = 0; b < 4; ++b) EXPECT_LE(std::abs(iceberg_self_influence(2, dt, 0.0, b).value), 1e-10);
    EXPECT_GT(iceberg_self_influence(2, dt, 0.5).value, 1e-5);
  }
  EXPECT_LE(std::abs(iceberg_self_influence(4, 0.2, 0.0, 5).value), 1e-10);
  // Single-site marginals of code states are maximally mixed.
  EXPECT_LE(std::abs(iceberg_self_influence(2, 0.0, 0.5).value), 1e-12);
  EXPECT_THROW(iceberg_self_influence(3, 0.1, 0.0), QecError);
}
