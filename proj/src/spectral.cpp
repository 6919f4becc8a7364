#include "tact/spectral.hpp"

#include <cmath>
#include <complex>

#include <unsupported/Eigen/FFT>

#include "tact/errors.hpp"

namespace tact {

static WaveletFilter from_dec_lo(std::string name, std::initializer_list<double> taps) {
    WaveletFilter f;
    f.name = std::move(name);
    const int m = static_cast<int>(taps.size());
    f.dec_lo.resize(m);
    int i = 0;
    for (double t : taps) f.dec_lo(i++) = t;
    f.rec_lo = f.dec_lo.reverse();
    f.dec_hi.resize(m);
    for (int k = 0; k < m; ++k) f.dec_hi(k) = (k % 2 == 0 ? 1.0 : -1.0) * f.rec_lo(k);
    f.rec_hi = f.dec_hi.reverse();
    return f;
}

WaveletFilter WaveletFilter::by_name(const std::string& name) {
    if (name == "haar" || name == "db1")
        return from_dec_lo(name, {0.7071067811865476, 0.7071067811865476});
    if (name == "db2")
        return from_dec_lo(name, {-0.12940952255092145, 0.22414386804185735,
                                  0.8365163037378079, 0.48296291314469025});
    if (name == "db4")
        return from_dec_lo(name, {-0.010597401784997278, 0.032883011666982945,
                                  0.030841381835986965, -0.18703481171888114,
                                  -0.02798376941698385, 0.6308807679295904,
                                  0.7148465705525415, 0.23037781330885523});
    throw ConfigError("unknown wavelet '" + name + "' (supported: haar, db2, db4)");
}

// half-sample symmetric reflection, folding as often as needed
static Eigen::Index sym_index(Eigen::Index j, Eigen::Index n) {
    while (j < 0 || j >= n) {
        if (j < 0) j = -j - 1;
        if (j >= n) j = 2 * n - 1 - j;
    }
    return j;
}

void dwt_step(const Eigen::Ref<const Eigen::VectorXd>& x, const WaveletFilter& filt,
              Eigen::VectorXd& approx, Eigen::VectorXd& detail) {
    const Eigen::Index n = x.size();
    const Eigen::Index m = filt.length();
    const Eigen::Index out_len = (n + m - 1) / 2;
    approx.resize(out_len);
    detail.resize(out_len);
    // valid part of the convolution with the extended signal, odd phase:
    // coefficient i taps extended samples ext[2i+1-k+(m-1)], ext offset -(m-1)
    for (Eigen::Index i = 0; i < out_len; ++i) {
        double a = 0.0, d = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) {
            double v = x(sym_index(2 * i + 1 - k, n));
            a += filt.dec_lo(k) * v;
            d += filt.dec_hi(k) * v;
        }
        approx(i) = a;
        detail(i) = d;
    }
}

static void upsample_conv_add(const Eigen::Ref<const Eigen::VectorXd>& coef,
                              const Eigen::VectorXd& g, Eigen::VectorXd& out) {
    // out[t] = full_conv(upsample(coef), g)[t + m - 1], t in [0, out_len)
    const Eigen::Index m = g.size();
    const Eigen::Index out_len = out.size();
    for (Eigen::Index i = 0; i < coef.size(); ++i) {
        const Eigen::Index base = 2 * i + 1 - (m - 1);  // position in cropped output
        const double c = coef(i);
        for (Eigen::Index k = 0; k < m; ++k) {
            const Eigen::Index t = base + k;
            if (t >= 0 && t < out_len) out(t) += c * g(k);
        }
    }
}

Eigen::VectorXd idwt_step(const Eigen::Ref<const Eigen::VectorXd>& approx,
                          const Eigen::Ref<const Eigen::VectorXd>& detail,
                          const WaveletFilter& filt, int out_len) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(out_len);
    upsample_conv_add(approx, filt.rec_lo, out);
    upsample_conv_add(detail, filt.rec_hi, out);
    return out;
}

DwtCoeffs dwt_decompose(const Eigen::Ref<const Eigen::VectorXd>& signal, int levels,
                        const WaveletFilter& filt) {
    if (levels < 1) throw ConfigError("levels must be >= 1");
    if (signal.size() < (Eigen::Index{1} << levels))
        throw ConfigError("signal length " + std::to_string(signal.size()) +
                          " too short for " + std::to_string(levels) + "-level decomposition");
    DwtCoeffs coeffs;
    Eigen::VectorXd current = signal;
    for (int lev = 0; lev < levels; ++lev) {
        Eigen::VectorXd a, d;
        dwt_step(current, filt, a, d);
        coeffs.approx.push_back(a);
        coeffs.detail.push_back(std::move(d));
        current = std::move(a);
    }
    return coeffs;
}

const Eigen::VectorXd& SubbandSet::band(const std::string& name) const {
    if (name.size() >= 2 && (name[0] == 'A' || name[0] == 'D')) {
        int lev = std::stoi(name.substr(1));
        if (lev >= 1 && lev <= levels)
            return name[0] == 'A' ? approx[lev - 1] : detail[lev - 1];
    }
    throw ConfigError("unknown sub-band '" + name + "'");
}

std::vector<std::string> SubbandSet::band_names(int levels) {
    std::vector<std::string> names;
    for (int k = 1; k <= levels; ++k) names.push_back("A" + std::to_string(k));
    for (int k = 1; k <= levels; ++k) names.push_back("D" + std::to_string(k));
    return names;
}

SubbandSet dwt_subbands(const Eigen::Ref<const Eigen::VectorXd>& signal, int levels,
                        const std::string& wavelet) {
    const WaveletFilter filt = WaveletFilter::by_name(wavelet);
    const DwtCoeffs coeffs = dwt_decompose(signal, levels, filt);

    // lengths of the cascade inputs, level 0 = original signal
    std::vector<int> len(levels + 1);
    len[0] = static_cast<int>(signal.size());
    for (int lev = 1; lev <= levels; ++lev)
        len[lev] = static_cast<int>(coeffs.approx[lev - 1].size());

    auto reconstruct = [&](int level, bool is_detail) {
        const Eigen::VectorXd& c = is_detail ? coeffs.detail[level - 1]
                                             : coeffs.approx[level - 1];
        Eigen::VectorXd zero = Eigen::VectorXd::Zero(c.size());
        Eigen::VectorXd cur = is_detail ? idwt_step(zero, c, filt, len[level - 1])
                                        : idwt_step(c, zero, filt, len[level - 1]);
        for (int lev = level - 1; lev >= 1; --lev) {
            Eigen::VectorXd z = Eigen::VectorXd::Zero(cur.size());
            cur = idwt_step(cur, z, filt, len[lev - 1]);
        }
        return cur;
    };

    SubbandSet set;
    set.levels = levels;
    for (int lev = 1; lev <= levels; ++lev) {
        set.approx.push_back(reconstruct(lev, false));
        set.detail.push_back(reconstruct(lev, true));
    }
    return set;
}

MagnitudeSpectrum magnitude_spectrum(const Eigen::Ref<const Eigen::VectorXd>& signal,
                                     double sample_rate_hz) {
    const int n = static_cast<int>(signal.size());
    if (n < 2) throw ConfigError("magnitude_spectrum requires at least 2 samples");
    if (sample_rate_hz <= 0.0) throw ConfigError("sample rate must be positive");

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> freq(n);
    std::vector<double> time(signal.data(), signal.data() + n);
    fft.fwd(freq, time);

    const int n_bins = n / 2 + 1;
    MagnitudeSpectrum spec;
    spec.input_length = n;
    spec.resolution_hz = sample_rate_hz / n;
    spec.freqs_hz.resize(n_bins);
    spec.mags.resize(n_bins);
    for (int k = 0; k < n_bins; ++k) {
        spec.freqs_hz(k) = k * spec.resolution_hz;
        double mag = std::abs(freq[static_cast<std::size_t>(k)]);
        const bool is_edge = (k == 0) || (n % 2 == 0 && k == n_bins - 1);
        spec.mags(k) = is_edge ? mag : 2.0 * mag;
    }
    return spec;
}

}  // namespace tact
