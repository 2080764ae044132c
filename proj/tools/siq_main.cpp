// siq: command-line front end for the SIQ/SEIQ library.
//
// Exit codes: 0 success, 1 validation or configuration error, 2 numerical failure.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "siq/errors.hpp"
#include "siq/scenario.hpp"

namespace {

using namespace siq;

const std::string kDefaultTable = std::string(SIQ_DATA_DIR) + "/diseases.csv";
const std::string kDefaultReference = std::string(SIQ_DATA_DIR) + "/diseases_reference.csv";

void emit(const CsvTable& t, const std::string& out) {
    if (out.empty() || out == "-") {
        write_csv(std::cout, t);
    } else {
        write_csv_file(out, t);
    }
}

// Model-parameter flags shared by several subcommands; unset flags keep the config value.
struct ParamFlags {
    std::optional<double> r, p, tau, kappa, sigma;

    void attach(CLI::App* app, bool with_kappa = true, bool with_sigma = true) {
        app->add_option("--r", r, "reproductive number r");
        app->add_option("--p", p, "identification probability");
        app->add_option("--tau", tau, "identification time (units of 1/gamma)");
        if (with_kappa) app->add_option("--kappa", kappa, "isolation time");
        if (with_sigma) app->add_option("--sigma", sigma, "latency period");
    }
    void apply(ModelParams& mp) const {
        if (r) mp.r = *r;
        if (p) mp.p = *p;
        if (tau) mp.tau = *tau;
        if (kappa) mp.kappa = *kappa;
        if (sigma) mp.sigma = *sigma;
    }
};

struct ScenarioFlags {
    std::string config;
    ParamFlags params;
    std::optional<double> i0, q0, e0, t_end, step;
    std::optional<std::string> out;

    void attach(CLI::App* app) {
        app->add_option("--config", config, "flat key = value scenario file");
        params.attach(app);
        app->add_option("--i0", i0, "initial infected fraction");
        app->add_option("--q0", q0, "initial isolated fraction");
        app->add_option("--e0", e0, "initial exposed fraction (SEIQ)");
        app->add_option("--t-end", t_end, "integration horizon");
        app->add_option("--step", step, "integration step");
        app->add_option("--out", out, "output CSV path (default: standard output)");
    }
    ScenarioConfig resolve(ScenarioConfig base = {}) const {
        ScenarioConfig cfg = config.empty() ? base : parse_config_file(config, base);
        params.apply(cfg.params);
        if (i0) cfg.i0 = *i0;
        if (q0) cfg.q0 = *q0;
        if (e0) cfg.e0 = *e0;
        if (t_end) cfg.t_end = *t_end;
        if (step) cfg.step = *step;
        if (out) cfg.out = *out;
        return cfg;
    }
};

std::vector<double> grid(double a, double b, std::size_t n) {
    if (n == 0) throw InvalidParams("grid needs at least one point");
    if (!(b >= a)) throw InvalidParams("grid bounds must satisfy min <= max");
    return linspace(a, b, n);
}

int run(int argc, char** argv) {
    CLI::App app{"SIQ/SEIQ delayed-isolation epidemic models"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    // critical
    std::string table = kDefaultTable, reference = kDefaultReference, crit_out;
    double crit_p = 0.8;
    auto* critical = app.add_subcommand("critical", "critical probability and identification time per disease");
    critical->add_option("--table", table, "disease table CSV");
    critical->add_option("--reference", reference, "reference values CSV (empty to skip)");
    critical->add_option("--p", crit_p, "identification probability")->required();
    critical->add_option("--out", crit_out, "output CSV path");

    // table2
    auto* table2 = app.add_subcommand("table2", "reproduce the disease threshold table with reference columns");
    table2->add_option("--table", table, "disease table CSV");
    table2->add_option("--reference", reference, "reference values CSV");
    table2->add_option("--p", crit_p, "identification probability");
    table2->add_option("--out", crit_out, "output CSV path");

    // simulate
    ScenarioFlags sim_flags;
    std::string model = "siq";
    double dt_out = 0.1;
    auto* simulate_cmd = app.add_subcommand("simulate", "integrate an outbreak scenario");
    sim_flags.attach(simulate_cmd);
    simulate_cmd->add_option("--model", model, "siq or seiq")->check(CLI::IsMember({"siq", "seiq"}));
    simulate_cmd->add_option("--dt-out", dt_out, "output spacing");

    // endemic
    ScenarioFlags end_flags;
    std::optional<double> end_q, end_eta;
    auto* endemic = app.add_subcommand("endemic", "endemic equilibrium on a leaf or predicted from outbreak data");
    end_flags.attach(endemic);
    endemic->add_option("--q", end_q, "leaf label q (otherwise predicted from i0, q0[, e0])");
    endemic->add_option("--eta", end_eta, "second leaf label (SEIQ)");

    // spectrum
    ParamFlags spec_params;
    std::string equilibrium = "disease-free", spec_out;
    double spec_q = 0.0, spec_eta = 0.0, spec_i0 = 0.01;
    std::optional<double> re_max, im_max;
    auto* spectrum = app.add_subcommand("spectrum", "count and locate unstable characteristic roots");
    spec_params.attach(spectrum);
    spectrum
        ->add_option("--equilibrium", equilibrium,
                     "disease-free, endemic (line point), reached (from outbreak i0) or seiq-disease-free")
        ->check(CLI::IsMember({"disease-free", "endemic", "reached", "seiq-disease-free"}));
    spectrum->add_option("--q", spec_q, "leaf label q");
    spectrum->add_option("--eta", spec_eta, "leaf label eta (SEIQ)");
    spectrum->add_option("--i0", spec_i0, "outbreak size for --equilibrium reached");
    spectrum->add_option("--re-max", re_max, "search box real extent");
    spectrum->add_option("--im-max", im_max, "search box imaginary half-height");
    spectrum->add_option("--out", spec_out, "output CSV path");

    // stability-map
    ParamFlags map_params;
    std::optional<double> q_max;
    double q_min = 0.0, k_min = 0.0, k_max = 25.0;
    std::size_t q_points = 21, k_points = 101;
    unsigned threads = 0;
    std::string map_out;
    auto* smap = app.add_subcommand("stability-map", "unstable counts of endemic equilibria over (q, kappa)");
    map_params.attach(smap, false, false);
    smap->add_option("--q-min", q_min);
    smap->add_option("--q-max", q_max, "default: just below q_c");
    smap->add_option("--q-points", q_points);
    smap->add_option("--kappa-min", k_min);
    smap->add_option("--kappa-max", k_max);
    smap->add_option("--kappa-points", k_points);
    smap->add_option("--threads", threads, "0: SIQ_THREADS or hardware concurrency");
    smap->add_option("--out", map_out, "output CSV path");

    // hopf
    ParamFlags hopf_params;
    double hopf_q = 0.0, hopf_kmax = 25.0;
    int m_max = 2;
    std::string hopf_out;
    auto* hopf = app.add_subcommand("hopf", "first Hopf point kappa_0 and the kappa_m cascade");
    hopf_params.attach(hopf, false, false);
    hopf->add_option("--q", hopf_q, "leaf label q");
    hopf->add_option("--kappa-max", hopf_kmax, "scan limit");
    hopf->add_option("--m-max", m_max, "last cascade index");
    hopf->add_option("--out", hopf_out, "output CSV path");

    // ipeak
    ScenarioFlags peak_flags;
    std::vector<double> kappas{0, 1, 2, 5, 10, 25};
    bool no_inf = false;
    auto* ipeak = app.add_subcommand("ipeak", "maximum infected fraction as a function of kappa");
    peak_flags.attach(ipeak);
    ipeak->add_option("--kappas", kappas, "kappa values")->delimiter(',');
    ipeak->add_flag("--no-inf", no_inf, "skip the permanent-isolation (kappa = inf) run");

    // network
    std::string graph = "er", edges_path, net_out;
    std::size_t n_nodes = 10000, replicas = 1, init_count = 0;
    double mean_degree = 10.0, init_frac = 0.001;
    std::uint64_t graph_seed = 1;
    SimConfig net_cfg;
    net_cfg.beta = 0.25;
    auto* network = app.add_subcommand("network", "stochastic SIQ process on a contact network");
    network->add_option("--graph", graph, "er, complete or edges")->check(CLI::IsMember({"er", "complete", "edges"}));
    network->add_option("--n", n_nodes, "node count");
    network->add_option("--mean-degree", mean_degree, "ER mean degree");
    network->add_option("--edges", edges_path, "edge-list file for --graph edges");
    network->add_option("--graph-seed", graph_seed, "ER generator seed");
    network->add_option("--beta", net_cfg.beta, "per-edge infection rate (1/day)");
    network->add_option("--gamma", net_cfg.gamma, "recovery rate (1/day)");
    network->add_option("--p", net_cfg.p, "identification probability");
    network->add_option("--tau", net_cfg.tau_days, "identification time (days)");
    network->add_option("--kappa", net_cfg.kappa_days, "isolation time (days)");
    network->add_option("--t-end", net_cfg.t_end_days, "horizon (days)");
    network->add_option("--dt-out", net_cfg.dt_out, "output spacing (days)");
    network->add_option("--seed", net_cfg.seed, "simulation seed (replica i uses seed + i)");
    network->add_option("--replicas", replicas, "number of averaged replicas");
    network->add_option("--initial-fraction", init_frac, "initially infected fraction");
    network->add_option("--initial-count", init_count, "initially infected count (overrides fraction)");
    network->add_option("--threads", threads, "0: SIQ_THREADS or hardware concurrency");
    network->add_option("--out", net_out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (critical->parsed() || table2->parsed()) {
        const auto diseases = read_disease_table(table);
        std::map<std::string, DiseaseReference> refs;
        if (!reference.empty()) refs = read_reference_table(reference);
        const auto rows = critical_rows(diseases, refs, crit_p);
        emit(critical->parsed() ? critical_table(rows, crit_p) : table2_table(rows, crit_p), crit_out);
    } else if (simulate_cmd->parsed()) {
        const ScenarioConfig cfg = sim_flags.resolve();
        emit(simulate_table(cfg, model == "seiq" ? ModelKind::SEIQ : ModelKind::SIQ, dt_out), cfg.out);
    } else if (endemic->parsed()) {
        const ScenarioConfig cfg = end_flags.resolve();
        cfg.params.validate();
        EndemicPoint e;
        std::string source;
        if (end_q) {
            e = end_eta || cfg.params.sigma > 0.0 ? seiq_endemic_point(cfg.params, end_eta.value_or(0.0), *end_q)
                                                 : endemic_point(cfg.params, *end_q);
            source = "given";
        } else {
            const ModelKind kind = cfg.params.sigma > 0.0 || cfg.e0 > 0.0 ? ModelKind::SEIQ : ModelKind::SIQ;
            e = predict_endemic_from_history(cfg.params, scenario_history(cfg, kind), cfg.step);
            source = "outbreak";
        }
        emit(endemic_table(cfg.params, e, source), cfg.out);
    } else if (spectrum->parsed()) {
        ModelParams mp;
        spec_params.apply(mp);
        mp.validate();
        CharEq ce;
        if (equilibrium == "disease-free") {
            ce = disease_free_chareq(mp, spec_q);
        } else if (equilibrium == "endemic") {
            ce = endemic_chareq(mp, spec_q);
        } else if (equilibrium == "reached") {
            const EndemicPoint e = predict_endemic_from_history(mp, outbreak_history(mp, spec_i0, spec_q));
            ce = chareq_at(mp, e);
        } else {
            ce = seiq_disease_free_chareq(mp, spec_eta, spec_q);
        }
        Box box = default_box(ce);
        if (re_max) box.re_max = *re_max;
        if (im_max) box.im_max = *im_max;
        const SpectralReport rep = count_unstable(ce, box);
        std::cerr << "unstable_count=" << rep.unstable_count << " classification=" << rep.label() << '\n';
        emit(spectrum_table(ce, rep, equilibrium), spec_out);
    } else if (smap->parsed()) {
        ModelParams mp;
        map_params.apply(mp);
        mp.validate();
        const double qc = q_critical(mp.r, mp.p, mp.tau);
        const double qm = q_max.value_or(qc - 1e-6);
        const StabilityMap m = stability_map(mp.r, mp.p, mp.tau, grid(q_min, qm, q_points),
                                             grid(k_min, k_max, k_points), threads);
        for (const auto& err : m.errors) std::cerr << "cell error: " << err << '\n';
        emit(stability_map_table(m, mp.r, mp.p, mp.tau), map_out);
    } else if (hopf->parsed()) {
        ModelParams mp;
        hopf_params.apply(mp);
        mp.validate();
        if (m_max < 0) throw InvalidParams("--m-max must be nonnegative");
        const auto hd = hopf_kappa0(mp.r, mp.p, mp.tau, hopf_q, hopf_kmax);
        if (!hd) std::cerr << "no Hopf point up to kappa=" << hopf_kmax << '\n';
        emit(hopf_table(mp.r, mp.p, mp.tau, hopf_q, hd, m_max, hopf_kmax), hopf_out);
    } else if (ipeak->parsed()) {
        ScenarioConfig base;
        base.t_end = 300.0;
        const ScenarioConfig cfg = peak_flags.resolve(base);
        std::vector<double> ks = kappas;
        if (!no_inf) ks.push_back(HUGE_VAL);
        const auto peaks = ipeak_scan(cfg.params, cfg.i0, cfg.q0, ks, cfg.t_end, cfg.step);
        emit(ipeak_table(cfg.params, cfg.i0, cfg.q0, peaks, cfg.t_end, cfg.step), cfg.out);
    } else if (network->parsed()) {
        Network net;
        if (graph == "er") {
            net = erdos_renyi(n_nodes, mean_degree, graph_seed);
        } else if (graph == "complete") {
            net = complete_graph(n_nodes);
        } else {
            if (edges_path.empty()) throw ConfigError("--graph edges needs --edges");
            net = from_edge_list(edges_path, network->count("--n") ? n_nodes : 0);
        }
        std::size_t k = init_count;
        if (k == 0) k = static_cast<std::size_t>(std::llround(init_frac * static_cast<double>(net.n)));
        k = std::max<std::size_t>(k, 1);
        net_cfg.initial_infected = random_nodes(net.n, k, net_cfg.seed ^ 0x9e3779b97f4a7c15ULL);
        const NetSeries s = replicas > 1 ? simulate_network_mean(net, net_cfg, replicas, threads)
                                         : simulate_network(net, net_cfg);
        emit(network_table(s, net_cfg, net, graph, replicas), net_out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const siq::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const siq::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
