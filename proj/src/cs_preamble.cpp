#include "usma/cs_preamble.hpp"

#include <algorithm>
#include <cmath>

namespace usma {

namespace {

constexpr double kVarFloor = 1e-12;

double clamp_var(double v) { return std::isfinite(v) ? std::max(v, kVarFloor) : v; }

struct DenoiserOutput {
    RVec activity;
    double mean_var = 0.0;
};

// Bernoulli-Gaussian MMSE denoiser for r^a = u^a + CN(0, v), u^a ~ CN(0, s)
// when active (shared across antennas), u = 0 otherwise.
DenoiserOutput denoise(const std::vector<CVec>& r, double v, double s, double lambda,
                       std::vector<CVec>& post_mean) {
    const std::size_t n = r.front().size();
    const double log_prior = std::log(lambda) - std::log1p(-lambda);
    const double log_shrink = std::log(v / (v + s));
    const double energy_weight = s / (v * (v + s));
    const double gain = s / (s + v);
    DenoiserOutput out;
    out.activity.resize(n);
    double var_sum = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        double llr = log_prior;
        for (const auto& ra : r) llr += log_shrink + std::norm(ra[c]) * energy_weight;
        const double p = llr >= 0 ? 1.0 / (1.0 + std::exp(-llr)) : std::exp(llr) / (1.0 + std::exp(llr));
        out.activity[c] = p;
        for (std::size_t a = 0; a < r.size(); ++a) {
            const cplx cond = gain * r[a][c];
            const cplx mean = p * cond;
            const double second = p * (gain * v + std::norm(cond));
            post_mean[a][c] = mean;
            var_sum += std::max(second - std::norm(mean), 0.0);
        }
    }
    out.mean_var = var_sum / static_cast<double>(n * r.size());
    return out;
}

}  // namespace

void PreambleConfig::validate() const {
    if (id_bits <= 0 || id_bits >= 63) throw ConfigError("id_bits out of range");
    if ((std::size_t{1} << id_bits) != matrix.n_cols()) throw ConfigError("2^id_bits must equal the column count");
    if (!(preamble_power > 0.0)) throw ConfigError("preamble power must be positive");
    if (rx_antennas < 1) throw ConfigError("need at least one receive antenna");
}

double PreambleConfig::amplitude_scale() const {
    return std::sqrt(preamble_power * static_cast<double>(matrix.n_cols()));
}

void AmpConfig::validate() const {
    if (n_iterations < 1) throw ConfigError("AMP needs at least one iteration");
    if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("AMP damping must lie in (0, 1]");
    if (sparsity_prior && !(*sparsity_prior > 0.0 && *sparsity_prior < 1.0)) {
        throw ConfigError("sparsity prior must lie in (0, 1)");
    }
    if (!(gain_prior_variance > 0.0)) throw ConfigError("gain prior variance must be positive");
    if (!(activity_threshold > 0.0 && activity_threshold < 1.0)) {
        throw ConfigError("activity threshold must lie in (0, 1)");
    }
}

std::size_t index_from_bits(std::span<const std::uint8_t> bits, int n_bits) {
    require_length(bits.size(), static_cast<std::size_t>(n_bits), "index_from_bits");
    std::size_t index = 0;
    for (auto b : bits) index = (index << 1) | (b & 1U);
    return index;
}

Bits bits_from_index(std::size_t index, int n_bits) {
    if (n_bits < 64 && (index >> n_bits) != 0) throw ConfigError("index does not fit in n_bits");
    Bits bits(static_cast<std::size_t>(n_bits));
    for (int i = 0; i < n_bits; ++i) bits[static_cast<std::size_t>(i)] = (index >> (n_bits - 1 - i)) & 1U;
    return bits;
}

CVec make_preamble_symbols(const PreambleConfig& cfg, std::size_t index) {
    if (index >= cfg.matrix.n_cols()) throw ConfigError("preamble index out of range");
    CVec col = cfg.matrix.column(index);
    const double scale = cfg.amplitude_scale();
    for (auto& v : col) v *= scale;
    return col;
}

DetectionResult amp_detect(std::span<const CVec> received, const PreambleConfig& cfg,
                           const AmpConfig& amp, double noise_var) {
    cfg.validate();
    amp.validate();
    const auto& A = cfg.matrix;
    const std::size_t n = A.n_cols();
    const std::size_t m = A.n_rows();
    require_length(received.size(), static_cast<std::size_t>(cfg.rx_antennas), "amp_detect antennas");
    if (!(noise_var > 0.0) || !std::isfinite(noise_var)) throw NumericalError("noise variance must be positive and finite");
    for (const auto& y : received) {
        require_length(y.size(), m, "amp_detect received preamble");
        for (const auto& v : y) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NumericalError("non-finite received sample");
        }
    }

    const std::size_t n_ant = received.size();
    const double s = cfg.amplitude_scale() * cfg.amplitude_scale() * amp.gain_prior_variance;
    const double rho = static_cast<double>(m) / static_cast<double>(n);
    const double lambda_floor = 1.0 / static_cast<double>(n);
    double lambda = amp.sparsity_prior.value_or(std::min(0.5, 16.0 / static_cast<double>(n)));

    std::vector<CVec> x_pri(n_ant, CVec(n));
    double v_pri = lambda * s;
    std::vector<CVec> r(n_ant, CVec(n));
    std::vector<CVec> post_mean(n_ant, CVec(n));
    CVec resid(m), back(n), scratch(n);

    DetectionResult result;
    double v_in = v_pri;
    for (int it = 0; it < amp.n_iterations; ++it) {
        // LMMSE module, extrinsic form for a row-orthogonal matrix:
        //   r = x_pri + (N/M) A^H (y - A x_pri),  v = (v_pri + sigma^2)/(M/N) - v_pri.
        for (std::size_t a = 0; a < n_ant; ++a) {
            A.forward(x_pri[a], resid, scratch);
            for (std::size_t i = 0; i < m; ++i) resid[i] = received[a][i] - resid[i];
            A.adjoint(resid, back);
            for (std::size_t c = 0; c < n; ++c) r[a][c] = x_pri[a][c] + back[c] / rho;
        }
        v_in = clamp_var((v_pri + noise_var) / rho - v_pri);

        // MMSE denoiser, then Gaussian message division back to the LMMSE module.
        const DenoiserOutput den = denoise(r, v_in, s, lambda, post_mean);
        const double v_post = clamp_var(den.mean_var);
        double v_ext;
        std::vector<CVec> x_ext = post_mean;
        const double precision_gain = 1.0 / v_post - 1.0 / v_in;
        if (precision_gain > 0.0) {
            v_ext = clamp_var(1.0 / precision_gain);
            for (std::size_t a = 0; a < n_ant; ++a) {
                for (std::size_t c = 0; c < n; ++c) {
                    x_ext[a][c] = v_ext * (post_mean[a][c] / v_post - r[a][c] / v_in);
                }
            }
        } else {
            v_ext = v_in;
            x_ext = r;
        }
        for (std::size_t a = 0; a < n_ant; ++a) {
            for (std::size_t c = 0; c < n; ++c) {
                x_pri[a][c] = amp.damping * x_ext[a][c] + (1.0 - amp.damping) * x_pri[a][c];
            }
        }
        v_pri = clamp_var(amp.damping * v_ext + (1.0 - amp.damping) * v_pri);
        if (!std::isfinite(v_pri)) throw NumericalError("AMP variance diverged");

        result.posteriors = den.activity;
        result.trace.push_back({v_in, v_post, lambda});
        if (!amp.sparsity_prior) {
            double mass = 0.0;
            for (double p : den.activity) mass += p;
            lambda = std::clamp(mass / static_cast<double>(n), lambda_floor, 0.5);
        }
    }

    const double cond_gain = s / (s + v_in);
    for (std::size_t c = 0; c < n; ++c) {
        if (result.posteriors[c] < amp.activity_threshold) continue;
        Detection d;
        d.column = c;
        d.gain_estimate.reserve(n_ant);
        for (std::size_t a = 0; a < n_ant; ++a) d.gain_estimate.push_back(cond_gain * r[a][c]);
        result.detected.push_back(std::move(d));
    }
    return result;
}

std::vector<std::vector<cplx>> estimate_channels(const DetectionResult& det, const PreambleConfig& cfg) {
    const double scale = 1.0 / cfg.amplitude_scale();
    std::vector<std::vector<cplx>> gains;
    gains.reserve(det.detected.size());
    for (const auto& d : det.detected) {
        auto& g = gains.emplace_back(d.gain_estimate);
        for (auto& v : g) v *= scale;
    }
    return gains;
}

double collision_probability(std::size_t n_columns, std::size_t n_active) {
    if (n_columns == 0) throw ConfigError("collision_probability needs at least one column");
    if (n_active <= 1) return 0.0;
    const double others = static_cast<double>(n_active - 1);
    return -std::expm1(others * std::log1p(-1.0 / static_cast<double>(n_columns)));
}

}  // namespace usma
