#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace tact {

/// Orthogonal wavelet filter bank derived from the low-pass decomposition
/// filter by the standard quadrature-mirror relations.
struct WaveletFilter {
    std::string name;
    Eigen::VectorXd dec_lo, dec_hi, rec_lo, rec_hi;

    int length() const { return static_cast<int>(dec_lo.size()); }

    static WaveletFilter by_name(const std::string& name);  // haar, db2, db4
};

/// Multi-level decomposition: `approx[k]`/`detail[k]` hold the level-(k+1)
/// coefficient sequences of a Mallat cascade with half-sample symmetric
/// boundary extension.
struct DwtCoeffs {
    std::vector<Eigen::VectorXd> approx;
    std::vector<Eigen::VectorXd> detail;
};

DwtCoeffs dwt_decompose(const Eigen::Ref<const Eigen::VectorXd>& signal, int levels,
                        const WaveletFilter& filt);

/// One analysis/synthesis step (exposed for oracle tests).
void dwt_step(const Eigen::Ref<const Eigen::VectorXd>& x, const WaveletFilter& filt,
              Eigen::VectorXd& approx, Eigen::VectorXd& detail);
Eigen::VectorXd idwt_step(const Eigen::Ref<const Eigen::VectorXd>& approx,
                          const Eigen::Ref<const Eigen::VectorXd>& detail,
                          const WaveletFilter& filt, int out_len);

/// Input-length reconstructions of every sub-band: zeroing all other
/// coefficient bands and inverting the cascade. Telescoping holds:
/// A_k = A_{k+1} + D_{k+1} and A1 + D1 equals the input.
struct SubbandSet {
    int levels = 4;
    std::vector<Eigen::VectorXd> approx;  // A1..A_levels reconstructions
    std::vector<Eigen::VectorXd> detail;  // D1..D_levels reconstructions

    // band("A3"), band("D1")
    const Eigen::VectorXd& band(const std::string& name) const;
    static std::vector<std::string> band_names(int levels);
};

SubbandSet dwt_subbands(const Eigen::Ref<const Eigen::VectorXd>& signal, int levels = 4,
                        const std::string& wavelet = "db4");

/// One-sided magnitude spectrum: DC and Nyquist bins unscaled, interior
/// bins doubled; freqs_hz[k] = k * fs / n.
struct MagnitudeSpectrum {
    Eigen::VectorXd freqs_hz;
    Eigen::VectorXd mags;
    double resolution_hz = 0.0;
    int input_length = 0;
};

MagnitudeSpectrum magnitude_spectrum(const Eigen::Ref<const Eigen::VectorXd>& signal,
                                     double sample_rate_hz);

}  // namespace tact
