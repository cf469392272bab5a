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

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "hrs/linalg.hpp"

namespace hrs
{
    // Isotropic elements on a circle, adjacent elements half a wavelength apart (chord).
    struct ArrayGeometry
    {
        int num_elements = 0;
        double radius = 0.0;                             // wavelengths
        std::vector<std::array<double, 2>> positions;    // wavelengths

        static ArrayGeometry uniform_circular(int num_elements);

        // a_m(phi) = exp(j 2 pi <p_m, (cos phi, sin phi)>)
        CVector steering(double phi) const;
    };

    struct CovarianceMatrix
    {
        CMatrix R;
        CMatrix U;        // eigenvectors, columns ordered like Lambda
        RVector Lambda;   // descending, clamped at zero
        double azimuth = 0.0;
        double spread = 0.0;

        // U diag(sqrt(Lambda)), i.e. R^{1/2} in the eigenbasis
        CMatrix coloring() const;
        Eigen::Index dim() const { return R.rows(); }
    };

    struct ChannelSet
    {
        CMatrix H_true;               // M x N, column k is h_k
        CMatrix H_hat;                // M x N, imperfect CSI seen by the transmitter
        CMatrix innovations;          // M x N, white g_k that generated H_true
        std::vector<int> cov_assignment;
        double tau = 0.0;

        Eigen::Index num_antennas() const { return H_true.rows(); }
        Eigen::Index num_users() const { return H_true.cols(); }
    };

    constexpr int default_integration_points = 512;

    // One-ring model: R = 1/(2 spread) * integral over [azimuth - spread, azimuth + spread] of a a^H,
    // midpoint rule. Eigenvalues below 1e-12 * max are clamped to zero.
    CovarianceMatrix build_covariance(const ArrayGeometry &geometry, double azimuth, double spread,
                                      int num_integration_points = default_integration_points);

    // h_k = U_a diag(sqrt(Lambda_a)) g_k, g_k ~ CN(0, I). H_hat is set equal to H_true (tau = 0).
    ChannelSet sample_channels(std::span<const CovarianceMatrix> covs, std::span<const int> assignment,
                               std::uint64_t rng_seed);

    // h_hat_k = U_a diag(sqrt(Lambda_a)) (sqrt(1 - tau^2) g_k + tau z_k) with fresh z_k.
    ChannelSet corrupt_csi(const ChannelSet &channels, std::span<const CovarianceMatrix> covs, double tau,
                           std::uint64_t rng_seed);

    // Draw an M x N matrix of i.i.d. CN(0, 1) entries, column by column.
    template <typename Rng>
    CMatrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng &rng);
}

#include <cmath>
#include <random>

namespace hrs
{
    template <typename Rng>
    CMatrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng &rng)
    {
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
        CMatrix out(rows, cols);
        for (Eigen::Index c = 0; c < cols; ++c)
            for (Eigen::Index r = 0; r < rows; ++r)
            {
                const double re = normal(rng);
                const double im = normal(rng);
                out(r, c) = cd(re, im);
            }
        return out;
    }
}
