// SPDX-License-Identifier: Apache-2.0
//
// hrs-cluster: user clustering for hierarchical rate splitting
// Copyright (C) 2026 The hrs-cluster authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "hrs/channel_model.hpp"
#include "hrs/errors.hpp"

#include <numbers>
#include <string>

namespace hrs
{
    ArrayGeometry ArrayGeometry::uniform_circular(int num_elements)
    {
        if (num_elements < 1)
            throw ConfigError("Array needs at least one element.");
        ArrayGeometry g;
        g.num_elements = num_elements;
        // chord between neighbours: 2 r sin(pi / M) = 1/2
        g.radius = num_elements > 1 ? 0.25 / std::sin(std::numbers::pi / num_elements) : 0.0;
        g.positions.resize(static_cast<std::size_t>(num_elements));
        for (int m = 0; m < num_elements; ++m)
        {
            const double angle = 2.0 * std::numbers::pi * m / num_elements;
            g.positions[static_cast<std::size_t>(m)] = {g.radius * std::cos(angle), g.radius * std::sin(angle)};
        }
        return g;
    }

    CVector ArrayGeometry::steering(double phi) const
    {
        const double ux = std::cos(phi), uy = std::sin(phi);
        CVector a(num_elements);
        for (int m = 0; m < num_elements; ++m)
        {
            const auto &p = positions[static_cast<std::size_t>(m)];
            a(m) = std::polar(1.0, 2.0 * std::numbers::pi * (p[0] * ux + p[1] * uy));
        }
        return a;
    }

    CMatrix CovarianceMatrix::coloring() const
    {
        return U * Lambda.cwiseSqrt().cast<cd>().asDiagonal();
    }

    CovarianceMatrix build_covariance(const ArrayGeometry &geometry, double azimuth, double spread,
                                      int num_integration_points)
    {
        if (!(spread > 0.0))
            throw ConfigError("Angular spread must be positive.");
        if (num_integration_points < 64)
            throw ConfigError("At least 64 integration points are required.");

        const int M = geometry.num_elements;
        CMatrix R = CMatrix::Zero(M, M);
        const double step = 2.0 * spread / num_integration_points;
        for (int i = 0; i < num_integration_points; ++i)
        {
            const double phi = azimuth - spread + (i + 0.5) * step;
            const CVector a = geometry.steering(phi);
            R.noalias() += a * a.adjoint();
        }
        R /= static_cast<double>(num_integration_points);

        if (linalg::hermitian_error(R) > 1e-10)
            throw NumericalError("Covariance lost Hermitian symmetry during integration.");
        R = 0.5 * (R + R.adjoint()).eval();

        Eigen::SelfAdjointEigenSolver<CMatrix> eig(R);
        if (eig.info() != Eigen::Success)
            throw NumericalError("Covariance eigendecomposition failed.");
        const RVector &ev = eig.eigenvalues(); // ascending
        if (ev.size() && ev(0) < -1e-10 * std::max(1.0, ev(ev.size() - 1)))
            throw NumericalError("Covariance is not positive semidefinite (min eigenvalue " +
                                 std::to_string(ev(0)) + ").");

        CovarianceMatrix out;
        out.R = std::move(R);
        out.azimuth = azimuth;
        out.spread = spread;
        out.U = eig.eigenvectors().rowwise().reverse();
        out.Lambda = ev.reverse();
        const double floor = 1e-12 * out.Lambda.maxCoeff();
        for (Eigen::Index i = 0; i < out.Lambda.size(); ++i)
            if (out.Lambda(i) < floor)
                out.Lambda(i) = 0.0;
        return out;
    }

    namespace
    {
        void check_covariances(std::span<const CovarianceMatrix> covs, std::span<const int> assignment)
        {
            if (covs.empty())
                throw ConfigError("No covariance matrices supplied.");
            const Eigen::Index M = covs.front().dim();
            for (const auto &c : covs)
                if (c.dim() != M || c.U.rows() != M || c.Lambda.size() != M)
                    throw ConfigError("Covariance matrices must share the antenna count.");
            for (int a : assignment)
                if (a < 0 || static_cast<std::size_t>(a) >= covs.size())
                    throw ConfigError("Covariance index " + std::to_string(a) + " out of range.");
        }
    }

    ChannelSet sample_channels(std::span<const CovarianceMatrix> covs, std::span<const int> assignment,
                               std::uint64_t rng_seed)
    {
        check_covariances(covs, assignment);
        const Eigen::Index M = covs.front().dim();
        const auto N = static_cast<Eigen::Index>(assignment.size());

        std::mt19937_64 rng(rng_seed);
        ChannelSet out;
        out.innovations = complex_gaussian(M, N, rng);
        out.H_true.resize(M, N);
        for (Eigen::Index k = 0; k < N; ++k)
        {
            const CMatrix color = covs[static_cast<std::size_t>(assignment[static_cast<std::size_t>(k)])].coloring();
            out.H_true.col(k) = color * out.innovations.col(k);
        }
        out.H_hat = out.H_true;
        out.cov_assignment.assign(assignment.begin(), assignment.end());
        out.tau = 0.0;
        return out;
    }

    ChannelSet corrupt_csi(const ChannelSet &channels, std::span<const CovarianceMatrix> covs, double tau,
                           std::uint64_t rng_seed)
    {
        if (!(tau >= 0.0 && tau <= 1.0))
            throw std::domain_error("CSI quality tau must lie in [0, 1].");
        check_covariances(covs, channels.cov_assignment);
        if (channels.innovations.rows() != channels.H_true.rows() ||
            channels.innovations.cols() != channels.H_true.cols())
            throw ConfigError("Channel set carries no innovations to perturb.");

        ChannelSet out = channels;
        out.tau = tau;
        if (tau == 0.0)
        {
            out.H_hat = channels.H_true;
            return out;
        }
        std::mt19937_64 rng(rng_seed);
        const CMatrix noise = complex_gaussian(channels.H_true.rows(), channels.H_true.cols(), rng);
        const double keep = std::sqrt(1.0 - tau * tau);
        for (Eigen::Index k = 0; k < channels.H_true.cols(); ++k)
        {
            const auto &cov = covs[static_cast<std::size_t>(channels.cov_assignment[static_cast<std::size_t>(k)])];
            out.H_hat.col(k) = cov.coloring() * (keep * channels.innovations.col(k) + tau * noise.col(k));
        }
        return out;
    }
}
