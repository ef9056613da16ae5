/*
 * facepuppet - Face puppetry from unstructured photo collections.
 *
 * File: src/denoise/rof_huber.cpp
 *
 * Copyright 2026 The facepuppet authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "facepuppet/denoise/rof_huber.hpp"
#include "facepuppet/core/depth_mesh.hpp"
#include "facepuppet/core/error.hpp"

#include <algorithm>
#include <cmath>

namespace facepuppet {
namespace denoise {

namespace {

// Forward-difference operator restricted to valid pairs.
struct Gradient
{
    int w;
    int h;
    std::vector<std::uint8_t> has_x; // pair (p, p + e_x) is active
    std::vector<std::uint8_t> has_y;

    explicit Gradient(const ScalarField& f) : w(f.width), h(f.height), has_x(f.values.size()), has_y(f.values.size())
    {
        for (int v = 0; v < h; ++v)
        {
            for (int u = 0; u < w; ++u)
            {
                const std::size_t i = f.index(u, v);
                has_x[i] = u + 1 < w && f.valid[i] && f.valid[i + 1];
                has_y[i] = v + 1 < h && f.valid[i] && f.valid[i + w];
            }
        }
    }

    void apply(const std::vector<double>& x, std::vector<double>& gx, std::vector<double>& gy) const
    {
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            gx[i] = has_x[i] ? x[i + 1] - x[i] : 0.0;
            gy[i] = has_y[i] ? x[i + w] - x[i] : 0.0;
        }
    }

    // Negative adjoint of apply: div = -grad^T.
    void divergence(const std::vector<double>& px, const std::vector<double>& py, std::vector<double>& div) const
    {
        std::fill(div.begin(), div.end(), 0.0);
        for (std::size_t i = 0; i < px.size(); ++i)
        {
            if (has_x[i])
            {
                div[i] += px[i];
                div[i + 1] -= px[i];
            }
            if (has_y[i])
            {
                div[i] += py[i];
                div[i + w] -= py[i];
            }
        }
    }
};

double energy(const Gradient& grad, const std::vector<double>& x, const ScalarField& f, double weight, double eps)
{
    std::vector<double> gx(x.size());
    std::vector<double> gy(x.size());
    grad.apply(x, gx, gy);
    double data = 0.0;
    double smooth = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        if (f.valid[i])
        {
            data += 0.5 * (x[i] - f.values[i]) * (x[i] - f.values[i]);
            smooth += huber(std::hypot(gx[i], gy[i]), eps);
        }
    }
    return data + weight * smooth;
}

void check_input(const ScalarField& field, const DenoiseParams& params)
{
    if (!(params.tv_weight >= 0.0) || !std::isfinite(params.tv_weight))
    {
        throw InputError("rof_huber_denoise: tv_weight must be non-negative");
    }
    if (!(params.huber_eps > 0.0) || !std::isfinite(params.huber_eps))
    {
        throw InputError("rof_huber_denoise: huber_eps must be positive");
    }
    std::size_t count = 0;
    for (std::size_t i = 0; i < field.values.size(); ++i)
    {
        if (field.valid[i])
        {
            if (!std::isfinite(field.values[i]))
            {
                throw InputError("rof_huber_denoise: non-finite value in the valid region");
            }
            ++count;
        }
    }
    if (count == 0)
    {
        throw InputError("rof_huber_denoise: empty valid set");
    }
}

} // namespace

ScalarField::ScalarField(int width_, int height_, std::vector<double> values_, std::vector<std::uint8_t> valid_)
    : width(width_), height(height_), values(std::move(values_)), valid(std::move(valid_))
{
    const std::size_t n = static_cast<std::size_t>(width) * height;
    if (width < 0 || height < 0 || values.size() != n || valid.size() != n)
    {
        throw InputError("ScalarField: buffer sizes do not match dimensions");
    }
}

void save_scalar_field(const ScalarField& field, const std::string& path)
{
    FloatGrid grid{field.width, field.height, std::vector<float>(4 * field.values.size(), 0.0f)};
    for (std::size_t i = 0; i < field.values.size(); ++i)
    {
        grid.quads[4 * i] = static_cast<float>(field.values[i]);
        grid.quads[4 * i + 3] = field.valid[i] ? 1.0f : 0.0f;
    }
    write_float_grid(grid, path);
}

ScalarField load_scalar_field(const std::string& path)
{
    const FloatGrid grid = read_float_grid(path);
    const std::size_t n = static_cast<std::size_t>(grid.width) * grid.height;
    std::vector<double> values(n);
    std::vector<std::uint8_t> valid(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        values[i] = grid.quads[4 * i];
        valid[i] = grid.quads[4 * i + 3] != 0.0f;
    }
    return ScalarField(grid.width, grid.height, std::move(values), std::move(valid));
}

double huber(double r, double eps) noexcept
{
    return r <= eps ? r * r / (2.0 * eps) : r - 0.5 * eps;
}

double rof_huber_energy(const ScalarField& x, const ScalarField& f, double tv_weight, double huber_eps)
{
    if (x.width != f.width || x.height != f.height)
    {
        throw InputError("rof_huber_energy: grid dimensions differ");
    }
    return energy(Gradient(f), x.values, f, tv_weight, huber_eps);
}

ScalarField rof_huber_denoise(const ScalarField& field, const DenoiseParams& params, DenoiseReport* report)
{
    check_input(field, params);
    const double weight = params.tv_weight;
    const double eps = params.huber_eps;
    const Gradient grad(field);
    const std::size_t n = field.values.size();

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (field.valid[i])
        {
            lo = std::min(lo, field.values[i]);
            hi = std::max(hi, field.values[i]);
        }
    }

    std::vector<double> x = field.values;
    const double initial = energy(grad, x, field, weight, eps);
    if (report)
    {
        *report = DenoiseReport{initial, initial, 0.0, 0};
    }
    if (weight == 0.0)
    {
        return field;
    }

    // G(x) = 1/2 |x - f|^2 is 1-strongly convex; the dual F*(y) = eps/(2w)|y|^2
    // + indicator(|y| <= w) is eps/w-strongly convex, giving a linear rate.
    const double L = std::sqrt(8.0);
    const double gamma = 1.0;
    const double delta = eps / weight;
    const double mu = 2.0 * std::sqrt(gamma * delta) / L;
    const double tau = mu / (2.0 * gamma);
    const double sigma = mu / (2.0 * delta);
    const double theta = 1.0 / (1.0 + mu);

    std::vector<double> x_bar = x;
    std::vector<double> x_old(n);
    std::vector<double> px(n, 0.0), py(n, 0.0), gx(n), gy(n), div(n);
    double previous = initial;
    int iteration = 0;
    for (; iteration < params.max_iterations;)
    {
        ++iteration;
        grad.apply(x_bar, gx, gy);
        for (std::size_t i = 0; i < n; ++i)
        {
            const double qx = (px[i] + sigma * gx[i]) / (1.0 + sigma * eps / weight);
            const double qy = (py[i] + sigma * gy[i]) / (1.0 + sigma * eps / weight);
            const double scale = std::max(1.0, std::hypot(qx, qy) / weight);
            px[i] = qx / scale;
            py[i] = qy / scale;
        }
        grad.divergence(px, py, div);
        x_old = x;
        for (std::size_t i = 0; i < n; ++i)
        {
            if (field.valid[i])
            {
                x[i] = (x[i] + tau * div[i] + tau * field.values[i]) / (1.0 + tau);
            }
        }
        for (std::size_t i = 0; i < n; ++i)
        {
            x_bar[i] = x[i] + theta * (x[i] - x_old[i]);
        }
        const double current = energy(grad, x, field, weight, eps);
        const bool settled = std::abs(previous - current) <= params.tolerance * std::abs(previous);
        previous = current;
        if (settled)
        {
            break;
        }
    }

    // Truncation to the input range never increases the energy.
    for (std::size_t i = 0; i < n; ++i)
    {
        if (field.valid[i])
        {
            x[i] = std::clamp(x[i], lo, hi);
        }
    }

    if (report)
    {
        // Gap P(x) + F*(y) + G*(div y), G*(z) = |z|^2 / 2 + <z, f>.
        grad.divergence(px, py, div);
        double dual = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            if (field.valid[i])
            {
                dual += 0.5 * div[i] * div[i] + div[i] * field.values[i];
                dual += eps / (2.0 * weight) * (px[i] * px[i] + py[i] * py[i]);
            }
        }
        report->final_energy = energy(grad, x, field, weight, eps);
        report->gap = report->final_energy + dual;
        report->iterations = iteration;
    }
    return ScalarField(field.width, field.height, std::move(x), field.valid);
}

} /* namespace denoise */
} /* namespace facepuppet */
