#include "qkd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace bt::qkd {

double db_to_transmittance(double loss_db) { return std::pow(10.0, -loss_db / 10.0); }

double LinkGeometry::t_ch() const { return db_to_transmittance(channel_loss_db); }

void LinkGeometry::validate() const {
    if (wavelength_nm <= 0.0) throw std::invalid_argument("geometry: wavelength_nm must be > 0");
    if (receiver_aperture_m <= 0.0)
        throw std::invalid_argument("geometry: receiver_aperture_m must be > 0");
    if (channel_loss_db < 0.0) throw std::invalid_argument("geometry: channel_loss_db must be >= 0");
}

double tracking_efficiency(double sigma_theta_rad, double theta_d_rad) {
    if (theta_d_rad <= 0.0) throw std::invalid_argument("tracking_efficiency: theta_d must be > 0");
    if (sigma_theta_rad < 0.0) throw std::invalid_argument("tracking_efficiency: sigma must be >= 0");
    const double r = sigma_theta_rad / theta_d_rad;
    return std::exp(-r * r);
}

double effective_transmittance(double t_ch, double eta_trk) {
    if (!(t_ch > 0.0 && t_ch <= 1.0) || !(eta_trk > 0.0 && eta_trk <= 1.0))
        throw std::invalid_argument("effective_transmittance: inputs must be in (0, 1]");
    return t_ch * eta_trk;
}

double tracking_error_rate(double sigma_theta_rad, double coeff_per_rad) {
    if (sigma_theta_rad < 0.0 || coeff_per_rad < 0.0)
        throw std::invalid_argument("tracking_error_rate: inputs must be >= 0");
    return std::min(1.0, coeff_per_rad * sigma_theta_rad);
}

// ---------------------------------------------------------------------------

void Bb84Params::validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("bb84: mu must be > 0");
    if (!(nu > 0.0 && nu < mu)) throw std::invalid_argument("bb84: need 0 < nu < mu");
    if (p_dark < 0.0 || p_dark > 1.0) throw std::invalid_argument("bb84: p_dark must be in [0, 1]");
    if (e_det < 0.0 || e_det > 1.0) throw std::invalid_argument("bb84: e_det must be in [0, 1]");
    if (e_trk < 0.0 || e_trk > 1.0) throw std::invalid_argument("bb84: e_trk must be in [0, 1]");
    if (f_ec < 1.0) throw std::invalid_argument("bb84: f_ec must be >= 1");
    if (n_pulses < 1.0) throw std::invalid_argument("bb84: n_pulses must be >= 1");
    if (!(p_mu > 0.0 && p_mu <= 1.0)) throw std::invalid_argument("bb84: p_mu must be in (0, 1]");
    if (!(eps_pa > 0.0 && eps_pa < 1.0)) throw std::invalid_argument("bb84: eps_pa must be in (0, 1)");
    if (f_clk_hz <= 0.0) throw std::invalid_argument("bb84: f_clk_hz must be > 0");
    if (n_max < 1) throw std::invalid_argument("bb84: n_max must be >= 1");
}

double yield_n(int n, double t_eff, double p_dark) {
    if (n < 0) throw std::invalid_argument("yield_n: n must be >= 0");
    return 1.0 - (1.0 - p_dark) * std::pow(1.0 - t_eff, n);
}

double gain(double x, double t_eff, double p_dark, int n_max) {
    if (x < 0.0) throw std::invalid_argument("gain: intensity must be >= 0");
    double poisson = std::exp(-x);  // P_0
    double sum = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        sum += poisson * yield_n(n, t_eff, p_dark);
        poisson *= x / (n + 1);
    }
    return sum;
}

double photon_error(int n, double t_eff, double p_dark, double e_det, double e_trk) {
    const double y = yield_n(n, t_eff, p_dark);
    if (y <= 0.0) throw numerical_error("photon_error: zero yield");
    const double hit = 1.0 - std::pow(1.0 - t_eff, n);
    return ((e_det + e_trk) * hit + p_dark / 2.0) / y;
}

double qber(double x, double t_eff, double p_dark, double e_det, double e_trk, int n_max) {
    const double q = gain(x, t_eff, p_dark, n_max);
    if (q <= 0.0) throw numerical_error("qber: zero gain");
    double poisson = std::exp(-x);
    double sum = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        const double y = yield_n(n, t_eff, p_dark);
        if (y > 0.0) sum += poisson * y * photon_error(n, t_eff, p_dark, e_det, e_trk);
        poisson *= x / (n + 1);
    }
    return sum / q;
}

double binary_entropy(double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("binary_entropy: p must be in [0, 1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

Bb84Rate bb84_key_rate_at(const Bb84Params& params, double t_eff) {
    params.validate();
    if (!(t_eff > 0.0 && t_eff <= 1.0))
        throw std::invalid_argument("bb84_key_rate: t_eff must be in (0, 1]");
    const double q_mu = gain(params.mu, t_eff, params.p_dark, params.n_max);
    Bb84Rate rate;
    if (q_mu <= 0.0) return rate;  // no clicks, no key

    const double y1 = yield_n(1, t_eff, params.p_dark);
    const double e1 = photon_error(1, t_eff, params.p_dark, params.e_det, params.e_trk);
    const double q1 = params.mu * std::exp(-params.mu) * y1;
    const double e_mu = qber(params.mu, t_eff, params.p_dark, params.e_det, params.e_trk,
                             params.n_max);
    const double delta_fk = std::sqrt(std::log(2.0 / params.eps_pa) /
                                      (2.0 * params.n_pulses * params.p_mu * q_mu));
    const double h_e1 = binary_entropy(std::min(e1, 1.0));
    const double r = params.q_sift *
                     (q1 * (1.0 - h_e1) - q_mu * params.f_ec * binary_entropy(e_mu) - delta_fk);
    rate.per_pulse = std::max(0.0, r);
    rate.bits_per_s = rate.per_pulse * params.f_clk_hz;
    return rate;
}

Bb84Rate bb84_key_rate(const Bb84Params& params, const LinkGeometry& geometry,
                       double sigma_theta_rad) {
    geometry.validate();
    const double eta = tracking_efficiency(sigma_theta_rad, geometry.theta_d_rad());
    return bb84_key_rate_at(params, effective_transmittance(geometry.t_ch(), eta));
}

// ---------------------------------------------------------------------------

void CvqkdParams::validate() const {
    if (!(v_mod > 0.0)) throw std::invalid_argument("cvqkd: v_mod must be > 0");
    if (xi < 0.0) throw std::invalid_argument("cvqkd: xi must be >= 0");
    if (!(eta_d > 0.0 && eta_d <= 1.0)) throw std::invalid_argument("cvqkd: eta_d must be in (0, 1]");
    if (v_el < 0.0) throw std::invalid_argument("cvqkd: v_el must be >= 0");
    if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("cvqkd: beta must be in [0, 1]");
}

double cv_chi_line(double t_eff, const CvqkdParams& p) {
    return (1.0 - t_eff) / t_eff + p.xi;
}

double cv_chi_hom(const CvqkdParams& p) {
    return ((1.0 - p.eta_d) + p.v_el) / p.eta_d;
}

double cv_chi_tot(double t_eff, const CvqkdParams& p) {
    if (!(t_eff > 0.0 && t_eff <= 1.0))
        throw std::invalid_argument("cvqkd: t_eff must be in (0, 1]");
    return cv_chi_line(t_eff, p) + cv_chi_hom(p) / t_eff;
}

double cv_snr(double t_eff, const CvqkdParams& p) {
    p.validate();
    return t_eff * p.v_mod / (1.0 + cv_chi_tot(t_eff, p));
}

double cv_mutual_information(double t_eff, const CvqkdParams& p) {
    p.validate();
    const double v = p.v_mod + 1.0;
    const double chi = cv_chi_tot(t_eff, p);
    return 0.5 * std::log2((v + chi) / (1.0 + chi));
}

double bosonic_entropy(double x) {
    if (x < 1.0 - 1e-9) throw std::invalid_argument("bosonic_entropy: eigenvalue below vacuum");
    if (x <= 1.0) return 0.0;
    const double a = (x + 1.0) / 2.0;
    const double b = (x - 1.0) / 2.0;
    return a * std::log2(a) - b * std::log2(b);
}

CvEigenvalues cv_symplectic_eigenvalues(double t_eff, const CvqkdParams& p) {
    p.validate();
    if (!(t_eff > 0.0 && t_eff <= 1.0))
        throw std::invalid_argument("cvqkd: t_eff must be in (0, 1]");
    const double v = p.v_mod + 1.0;
    const double chi_line = cv_chi_line(t_eff, p);
    const double chi_hom = cv_chi_hom(p);
    const double chi_tot = chi_line + chi_hom / t_eff;

    // Symplectic spectrum of the shared state before detection...
    const double a = v * v * (1.0 - 2.0 * t_eff) + 2.0 * t_eff +
                     t_eff * t_eff * (v + chi_line) * (v + chi_line);
    const double b = t_eff * t_eff * (v * chi_line + 1.0) * (v * chi_line + 1.0);
    const double disc = std::sqrt(std::max(0.0, a * a - 4.0 * b));
    CvEigenvalues e;
    e.l1 = std::sqrt(0.5 * (a + disc));
    e.l2 = std::sqrt(std::max(0.0, 0.5 * (a - disc)));

    // ...and conditioned on Bob's homodyne outcome through the trusted
    // detector (beamsplitter eta_d with an EPR ancilla absorbing v_el).
    const double sqrt_b = std::sqrt(b);
    const double denom = t_eff * (v + chi_tot);
    const double c = (a * chi_hom + v * sqrt_b + t_eff * (v + chi_line)) / denom;
    const double d = sqrt_b * (v + sqrt_b * chi_hom) / denom;
    const double disc2 = std::sqrt(std::max(0.0, c * c - 4.0 * d));
    e.l3 = std::sqrt(0.5 * (c + disc2));
    e.l4 = std::sqrt(std::max(0.0, 0.5 * (c - disc2)));

    for (double l : {e.l1, e.l2, e.l3, e.l4})
        if (l < 1.0 - 1e-9)
            throw std::invalid_argument("cvqkd: non-physical covariance (eigenvalue below 1)");
    return e;
}

double cv_holevo(double t_eff, const CvqkdParams& p) {
    if (t_eff == 1.0 && p.xi == 0.0) return 0.0;  // lossless noiseless channel leaks nothing
    const CvEigenvalues e = cv_symplectic_eigenvalues(t_eff, p);
    return bosonic_entropy(e.l1) + bosonic_entropy(e.l2) -
           bosonic_entropy(e.l3) - bosonic_entropy(e.l4);
}

double cv_key_rate(double t_eff, const CvqkdParams& p) {
    p.validate();
    return std::max(0.0, p.beta * cv_mutual_information(t_eff, p) - cv_holevo(t_eff, p));
}

// ---------------------------------------------------------------------------

SweepTable rate_vs_loss_sweep(const std::vector<double>& loss_db_grid,
                              double sigma_low_rad, double sigma_high_rad,
                              const LinkGeometry& geometry, const Bb84Params& bb84,
                              const CvqkdParams& cv) {
    if (loss_db_grid.empty()) throw std::invalid_argument("sweep: empty loss grid");
    geometry.validate();
    bb84.validate();
    cv.validate();
    const double theta_d = geometry.theta_d_rad();
    const double eta_low = tracking_efficiency(sigma_low_rad, theta_d);
    const double eta_high = tracking_efficiency(sigma_high_rad, theta_d);

    SweepTable table;
    table.sigma_low_rad = sigma_low_rad;
    table.sigma_high_rad = sigma_high_rad;
    table.rows.reserve(loss_db_grid.size());
    for (double loss : loss_db_grid) {
        const double t_ch = db_to_transmittance(loss);
        SweepRow row;
        row.loss_db = loss;
        row.r_dv_low = bb84_key_rate_at(bb84, effective_transmittance(t_ch, eta_low)).per_pulse;
        row.r_dv_high = bb84_key_rate_at(bb84, effective_transmittance(t_ch, eta_high)).per_pulse;
        row.k_cv_low = cv_key_rate(effective_transmittance(t_ch, eta_low), cv);
        row.k_cv_high = cv_key_rate(effective_transmittance(t_ch, eta_high), cv);
        table.rows.push_back(row);
    }
    return table;
}

void write_sweep_csv(const SweepTable& table, const LinkGeometry& geometry,
                     const Bb84Params& bb84, const CvqkdParams& cv,
                     const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_sweep_csv: cannot open " + path);
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "# wavelength_nm=%.10g receiver_aperture_m=%.10g theta_d_rad=%.10g\n"
                  "# sigma_low_rad=%.10g sigma_high_rad=%.10g\n"
                  "# bb84: mu=%.10g nu=%.10g p_dark=%.10g e_det=%.10g e_trk=%.10g f_ec=%.10g"
                  " n_pulses=%.10g p_mu=%.10g eps_pa=%.10g n_max=%d\n"
                  "# cvqkd: v_mod=%.10g xi=%.10g eta_d=%.10g v_el=%.10g beta=%.10g\n",
                  geometry.wavelength_nm, geometry.receiver_aperture_m, geometry.theta_d_rad(),
                  table.sigma_low_rad, table.sigma_high_rad, bb84.mu, bb84.nu, bb84.p_dark,
                  bb84.e_det, bb84.e_trk, bb84.f_ec, bb84.n_pulses, bb84.p_mu, bb84.eps_pa,
                  bb84.n_max, cv.v_mod, cv.xi, cv.eta_d, cv.v_el, cv.beta);
    out << buf;
    out << "loss_db,r_dv_low,r_dv_high,k_cv_low,k_cv_high\n";
    for (const SweepRow& r : table.rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.loss_db,
                      r.r_dv_low, r.r_dv_high, r.k_cv_low, r.k_cv_high);
        out << buf;
    }
}

}  // namespace bt::qkd
