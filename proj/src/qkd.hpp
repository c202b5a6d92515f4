#pragma once

#include <string>
#include <vector>

#include "common.hpp"

namespace bt::qkd {

// Receiver-side link geometry for the quantum channel. Loss convention used
// throughout: L dB maps to linear transmittance 10^(-L/10).
struct LinkGeometry {
    double wavelength_nm = 1550.0;
    double receiver_aperture_m = 0.30;
    double channel_loss_db = 30.0;

    double theta_d_rad() const { return 1.22 * wavelength_nm * 1e-9 / receiver_aperture_m; }
    double t_ch() const;
    void validate() const;
};

double db_to_transmittance(double loss_db);

// Coupling efficiency under Gaussian pointing jitter: exp(-sigma^2 / theta_d^2).
double tracking_efficiency(double sigma_theta_rad, double theta_d_rad);
double effective_transmittance(double t_ch, double eta_trk);

// Optional linear map from RMS pointing jitter to the polarization/basis
// error fed into BB84; the coefficient defaults to zero (e_trk configured
// directly) because no calibrated mapping is available.
double tracking_error_rate(double sigma_theta_rad, double coeff_per_rad = 0.0);

// ---------------------------------------------------------------------------
// Decoy-state BB84, finite-key regime.

struct Bb84Params {
    double mu = 0.5;         // signal mean photon number
    double nu = 0.1;         // decoy mean photon number
    double p_dark = 1e-6;    // dark-count probability per window
    double e_det = 0.01;     // detector misalignment error
    double e_trk = 0.0;      // tracking-induced polarization/basis error
    double f_ec = 1.16;      // error-correction inefficiency
    double n_pulses = 1e12;  // total transmitted pulses
    double p_mu = 0.9;       // probability of sending a signal state
    double eps_pa = 1e-10;   // privacy-amplification parameter
    double f_clk_hz = 1e8;   // clock rate
    double q_sift = 1.0;     // basis-sifting factor
    int n_max = 12;          // Poisson truncation order

    void validate() const;
};

// Y_n = 1 - (1 - p_dark)(1 - T_eff)^n.
double yield_n(int n, double t_eff, double p_dark);
// Q_x = sum_{n<=n_max} P_n(x) Y_n with Poisson P_n.
double gain(double x, double t_eff, double p_dark, int n_max);
// e_n = [(e_det + e_trk)(1 - (1 - T_eff)^n) + p_dark/2] / Y_n.
double photon_error(int n, double t_eff, double p_dark, double e_det, double e_trk);
// E_x = sum P_n(x) Y_n e_n / Q_x.
double qber(double x, double t_eff, double p_dark, double e_det, double e_trk, int n_max);
double binary_entropy(double p);

struct Bb84Rate {
    double per_pulse = 0.0;
    double bits_per_s = 0.0;
};

Bb84Rate bb84_key_rate_at(const Bb84Params& params, double t_eff);
Bb84Rate bb84_key_rate(const Bb84Params& params, const LinkGeometry& geometry,
                       double sigma_theta_rad);

// ---------------------------------------------------------------------------
// Gaussian-modulated CV-QKD, collective attack, reverse reconciliation,
// homodyne detection with trusted detector noise.

struct CvqkdParams {
    double v_mod = 4.0;   // modulation variance V_A (SNU)
    double xi = 0.01;     // excess noise at Alice (SNU)
    double eta_d = 0.72;  // homodyne detector efficiency
    double v_el = 0.02;   // electronic noise (SNU)
    double beta = 0.95;   // reconciliation efficiency

    void validate() const;
};

double cv_chi_line(double t_eff, const CvqkdParams& p);
double cv_chi_hom(const CvqkdParams& p);
double cv_chi_tot(double t_eff, const CvqkdParams& p);
double cv_snr(double t_eff, const CvqkdParams& p);
double cv_mutual_information(double t_eff, const CvqkdParams& p);

// Bosonic entropy g(x) = ((x+1)/2) log2((x+1)/2) - ((x-1)/2) log2((x-1)/2).
double bosonic_entropy(double x);

struct CvEigenvalues {
    double l1 = 1.0, l2 = 1.0;  // of Eve's state
    double l3 = 1.0, l4 = 1.0;  // conditioned on Bob's homodyne outcome
};

CvEigenvalues cv_symplectic_eigenvalues(double t_eff, const CvqkdParams& p);
double cv_holevo(double t_eff, const CvqkdParams& p);
double cv_key_rate(double t_eff, const CvqkdParams& p);

// ---------------------------------------------------------------------------
// Rate-vs-loss sweep: four curves, DV and CV at the low- and high-power
// tracking error.

struct SweepRow {
    double loss_db = 0.0;
    double r_dv_low = 0.0;
    double r_dv_high = 0.0;
    double k_cv_low = 0.0;
    double k_cv_high = 0.0;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    double sigma_low_rad = 0.0;
    double sigma_high_rad = 0.0;
};

SweepTable rate_vs_loss_sweep(const std::vector<double>& loss_db_grid,
                              double sigma_low_rad, double sigma_high_rad,
                              const LinkGeometry& geometry, const Bb84Params& bb84,
                              const CvqkdParams& cv);

// CSV with the parameter set echoed in a comment header.
void write_sweep_csv(const SweepTable& table, const LinkGeometry& geometry,
                     const Bb84Params& bb84, const CvqkdParams& cv,
                     const std::string& path);

}  // namespace bt::qkd
