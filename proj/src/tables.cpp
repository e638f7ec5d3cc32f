#include "fracorder/tables.hpp"

#include "fracorder/errors.hpp"
#include "fracorder/io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <thread>

namespace fracorder {

namespace {

// Rows nu = 0.1..0.9; column pairs (ratio, log) for N1 small, N1 large,
// N2 small, N2 large, N3 small, N3 large.
constexpr double kReference1[9][12] = {
    {0.1002, 0.0922, 0.1024, 0.0915, 0.1000, 0.0880, 0.1000, 0.0537, 0.0764, 0.0661, 0.0084, -0.0691},
    {0.2005, 0.1867, 0.2042, 0.1854, 0.2001, 0.1827, 0.2000, 0.1495, 0.1771, 0.1615, 0.1088, 0.0290},
    {0.3007, 0.2831, 0.3069, 0.2805, 0.2999, 0.2793, 0.2999, 0.2467, 0.2773, 0.2586, 0.2092, 0.1277},
    {0.4010, 0.3811, 0.4111, 0.3763, 0.3995, 0.3776, 0.3998, 0.3453, 0.3773, 0.3571, 0.3090, 0.2271},
    {0.5017, 0.4804, 0.5180, 0.4715, 0.4998, 0.4774, 0.4997, 0.4452, 0.4774, 0.4569, 0.4086, 0.3270},
    {0.6027, 0.5807, 0.6248, 0.5640, 0.5995, 0.5786, 0.5995, 0.5462, 0.5773, 0.5580, 0.5082, 0.4275},
    {0.7033, 0.6814, 0.7291, 0.6507, 0.6998, 0.6811, 0.6996, 0.6482, 0.6769, 0.6602, 0.6069, 0.5284},
    {0.8018, 0.7816, 0.8184, 0.7272, 0.8003, 0.7848, 0.8001, 0.7512, 0.7768, 0.7634, 0.7061, 0.6298},
    {0.8960, 0.8796, 0.8783, 0.7890, 0.8997, 0.8896, 0.8998, 0.8550, 0.8758, 0.8676, 0.8045, 0.7315},
};
constexpr double kReference2[9][12] = {
    {0.1010, 0.0920, 0.1031, 0.0913, 0.1008, 0.0878, 0.1003, 0.0535, 0.0772, 0.0659, 0.0092, -0.0693},
    {0.2013, 0.1865, 0.2050, 0.1851, 0.2009, 0.1825, 0.2002, 0.1492, 0.1779, 0.1613, 0.1096, 0.0288},
    {0.3016, 0.2828, 0.3078, 0.2803, 0.3007, 0.2790, 0.3008, 0.2465, 0.2781, 0.2583, 0.2100, 0.1275},
    {0.4019, 0.3808, 0.4120, 0.3761, 0.4004, 0.3773, 0.4007, 0.3451, 0.3781, 0.3568, 0.3098, 0.2269},
    {0.5026, 0.4802, 0.5189, 0.4712, 0.5007, 0.4772, 0.5006, 0.4449, 0.4783, 0.4567, 0.4095, 0.3268},
    {0.6036, 0.5805, 0.6257, 0.5637, 0.6005, 0.5784, 0.6004, 0.5459, 0.5782, 0.5577, 0.5091, 0.4273},
    {0.7042, 0.6812, 0.7300, 0.6505, 0.7007, 0.6809, 0.7006, 0.6480, 0.6778, 0.6599, 0.6078, 0.5282},
    {0.8028, 0.7814, 0.8193, 0.7270, 0.8013, 0.7846, 0.8010, 0.7509, 0.7777, 0.7632, 0.7071, 0.6296},
    {0.8970, 0.8794, 0.8792, 0.7888, 0.9007, 0.8894, 0.9007, 0.8548, 0.8767, 0.8673, 0.8054, 0.7313},
};
constexpr double kReference3[9][12] = {
    {0.1024, 0.0915, 0.1032, 0.0787, 0.1000, 0.0744, 0.1000, 0.0326, 0.0720, 0.0481, 0.0014, -0.1045},
    {0.2042, 0.1854, 0.2056, 0.1777, 0.1999, 0.1744, 0.1999, 0.1326, 0.1719, 0.1481, 0.1007, -0.0045},
    {0.3069, 0.2805, 0.3096, 0.2758, 0.2998, 0.2744, 0.2998, 0.2326, 0.2717, 0.2481, 0.2000, 0.0955},
    {0.4111, 0.3763, 0.4155, 0.3724, 0.3997, 0.3744, 0.3994, 0.3326, 0.3716, 0.3481, 0.2992, 0.1955},
    {0.5180, 0.4715, 0.5251, 0.4660, 0.4998, 0.4744, 0.5004, 0.4326, 0.4717, 0.4481, 0.3991, 0.2955},
    {0.6248, 0.5640, 0.6332, 0.5546, 0.6006, 0.5744, 0.5988, 0.5326, 0.5721, 0.5481, 0.4985, 0.3955},
    {0.7291, 0.6507, 0.7365, 0.6351, 0.7011, 0.6744, 0.6999, 0.6326, 0.6724, 0.6481, 0.5984, 0.4955},
    {0.8184, 0.7272, 0.8217, 0.7037, 0.8012, 0.7744, 0.8011, 0.7326, 0.7721, 0.7481, 0.6982, 0.5955},
    {0.8783, 0.7890, 0.8751, 0.7574, 0.9006, 0.8744, 0.8992, 0.8326, 0.8722, 0.8481, 0.7976, 0.6955},
};

constexpr NoiseKind kNoiseOrder[3] = {NoiseKind::N1, NoiseKind::N2, NoiseKind::N3};

double row_nu(std::size_t r) { return static_cast<double>(r + 1) / 10.0; }

TableCell run_cell(const TableSetup &s, double nu0, NoiseKind noise, double eps, const PipelineOptions &options) {
    const NoiseSpec ns{noise, eps};
    Scenario sc = s.example == Example::E71
                      ? example71_scenario(nu0, s.kind, ns, preset_grid(GridPreset::Nonuniform71))
                      : example72_scenario(nu0, ns, preset_grid(GridPreset::Uniform72));
    const double t_end = sc.observation.grid.last();
    const BasisSpec spec = example_basis(s.example, nu0, t_end);
    TableCell cell{nu0, noise, eps, std::nan(""), std::nan("")};
    try {
        const auto rep = run_pipeline(sc.observation, spec, RegGrids::defaults(t_end), sc.fdo, options);
        cell.nu_ratio = rep.nu_ratio;
        cell.nu_log = rep.nu_log;
    } catch (const PipelineSelectionError &e) {
        const auto &rep = e.report();
        if (rep.ratio_selection)
            cell.nu_ratio = rep.nu_ratio;
        if (rep.log_selection_pair)
            cell.nu_log = rep.nu_log;
    }
    return cell;
}

} // namespace

BasisSpec example_basis(Example ex, double nu0, double t_end) {
    const double reference = ex == Example::E71 ? nu0 / 2.0 : nu0 / 5.0;
    BasisSpec spec;
    spec.power_exponents = scaled_exponents(reference);
    spec.total_size = 9;
    spec.rho = 0.99;
    spec.t_end = t_end;
    return spec;
}

TableSetup table_setup(int id) {
    switch (id) {
    case 1: return {Example::E71, FdoKind::TypeI, 0.03, 0.3};
    case 2: return {Example::E71, FdoKind::TypeII, 0.03, 0.3};
    case 3: return {Example::E72, FdoKind::TypeI, 0.04, 0.4};
    default: throw ConfigError(fmt::format("table id must be 1, 2 or 3, got {}", id));
    }
}

std::vector<TableCell> run_table(int id, const PipelineOptions &options) {
    const TableSetup s = table_setup(id);
    std::vector<TableCell> cells(54);
    PipelineOptions inner = options;
    inner.threads = 0;
    auto work = [&](std::size_t c) {
        const std::size_t r = c / 6;
        const std::size_t k = c % 6;
        cells[c] = run_cell(s, row_nu(r), kNoiseOrder[k / 2], k % 2 == 0 ? s.eps_small : s.eps_large, inner);
    };
    const unsigned workers = std::min<unsigned>(options.threads, 54);
    if (workers <= 1) {
        for (std::size_t c = 0; c < cells.size(); ++c)
            work(c);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t c = w; c < cells.size(); c += workers)
                    work(c);
            });
        for (auto &t : pool)
            t.join();
    }
    return cells;
}

std::vector<TableCell> reference_table(int id) {
    const TableSetup s = table_setup(id);
    const auto &ref = id == 1 ? kReference1 : id == 2 ? kReference2 : kReference3;
    std::vector<TableCell> cells;
    cells.reserve(54);
    for (std::size_t r = 0; r < 9; ++r)
        for (std::size_t k = 0; k < 6; ++k)
            cells.push_back({row_nu(r), kNoiseOrder[k / 2], k % 2 == 0 ? s.eps_small : s.eps_large,
                             ref[r][2 * k], ref[r][2 * k + 1]});
    return cells;
}

std::string table_csv(const std::vector<TableCell> &cells) {
    std::string out = "nu_true,noise,epsilon,nu_ratio,nu_log\n";
    for (const auto &c : cells)
        out += fmt::format("{},{},{},{},{}\n", format_double(c.nu_true), to_string(c.noise),
                           format_double(c.epsilon), format_double(c.nu_ratio), format_double(c.nu_log));
    return out;
}

std::string table_diff_csv(const std::vector<TableCell> &computed, const std::vector<TableCell> &reference) {
    if (computed.size() != reference.size())
        throw PreconditionError("table diff: row counts differ");
    std::string out = "nu_true,noise,epsilon,nu_ratio,ref_ratio,diff_ratio,nu_log,ref_log,diff_log\n";
    for (std::size_t i = 0; i < computed.size(); ++i) {
        const auto &c = computed[i];
        const auto &r = reference[i];
        out += fmt::format("{},{},{},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f}\n", format_double(c.nu_true),
                           to_string(c.noise), format_double(c.epsilon), c.nu_ratio, r.nu_ratio,
                           c.nu_ratio - r.nu_ratio, c.nu_log, r.nu_log, c.nu_log - r.nu_log);
    }
    return out;
}

} // namespace fracorder
