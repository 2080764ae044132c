#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace siq {

struct Network {
    std::size_t n = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // u < v
    std::vector<std::vector<std::uint32_t>> adj;

    double mean_degree() const { return n == 0 ? 0.0 : 2.0 * static_cast<double>(edges.size()) / n; }
};

// Builds adjacency lists; throws FileParse on self-loops or duplicates.
Network make_network(std::size_t n, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges);

Network erdos_renyi(std::size_t n, double mean_degree, std::uint64_t seed);
Network complete_graph(std::size_t n);
// Whitespace-separated 0-indexed pairs, '#' starts a comment line. Node count is max id + 1
// unless n_hint is larger.
Network from_edge_list(const std::string& path, std::size_t n_hint = 0);

// Reproducible random stream: std::mt19937_64 seeded with the 64-bit seed directly, with
// uniforms built from the raw 64-bit output (53 high bits) rather than the library
// distributions, whose algorithms differ between standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform();                      // [0, 1)
    double exponential(double rate);
    std::uint64_t below(std::uint64_t n);  // uniform in [0, n)
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 eng_;
};

struct SimConfig {
    double beta = 0.0;       // per-edge infection rate, 1/day
    double gamma = 1.0;      // recovery rate, 1/day
    double p = 0.0;
    double tau_days = 0.0;
    double kappa_days = 0.0;
    double t_end_days = 10.0;
    double dt_out = 0.1;     // output grid spacing
    std::uint64_t seed = 1;
    std::vector<std::uint32_t> initial_infected;
    // Identification only applies to infections that happen during the run; nodes infected
    // at t = 0 are never isolated (matching the jump at theta = 0 of outbreak data).
    bool isolate_initial = false;
};

struct NetSeries {
    std::vector<double> t;
    std::vector<double> S, I, Q;  // fractions of n
    std::uint64_t events = 0;
    std::uint64_t infections = 0;   // transmissions during the run
    std::uint64_t isolations = 0;
    int max_generation = 0;         // initially infected nodes are generation 0
};

NetSeries simulate_network(const Network& net, const SimConfig& cfg);

// Mean over replicas, run with seeds seed0, seed0+1, ...; replicas run in parallel and are
// merged in seed order.
NetSeries simulate_network_mean(const Network& net, SimConfig cfg, std::size_t replicas,
                                unsigned threads = 0);

struct MeanFieldParams {
    double r = 0.0;
    double tau = 0.0;    // gamma * tau_days
    double kappa = 0.0;  // gamma * kappa_days
    double eps = 0.0;
    double time_scale = 1.0;  // model time = time_scale * days
};

MeanFieldParams mean_field_params(double beta, double mean_degree, double gamma, double p = 0.0,
                                  double tau_days = 0.0, double kappa_days = 0.0);

// Picks k distinct nodes uniformly (partial Fisher-Yates on the Rng).
std::vector<std::uint32_t> random_nodes(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace siq
