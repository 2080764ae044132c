#include "siq/network.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <thread>

#include "siq/errors.hpp"
#include "siq/spectral.hpp"

namespace siq {

double Rng::uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

double Rng::exponential(double rate) { return -std::log1p(-uniform()) / rate; }

std::uint64_t Rng::below(std::uint64_t n) {
    // Rejection keeps the result exactly uniform.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = eng_();
    } while (x >= limit);
    return x % n;
}

Network make_network(std::size_t n, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
    Network net;
    net.n = n;
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (auto& e : edges) {
        if (e.first == e.second) throw FileParse("self-loop at node " + std::to_string(e.first));
        if (e.first > e.second) std::swap(e.first, e.second);
        if (e.second >= n) throw FileParse("node id " + std::to_string(e.second) + " out of range");
        if (!seen.insert(e).second) {
            throw FileParse("duplicate edge " + std::to_string(e.first) + " " + std::to_string(e.second));
        }
    }
    net.edges = std::move(edges);
    net.adj.assign(n, {});
    for (const auto& [u, v] : net.edges) {
        net.adj[u].push_back(v);
        net.adj[v].push_back(u);
    }
    return net;
}

Network erdos_renyi(std::size_t n, double mean_degree, std::uint64_t seed) {
    if (n < 1) throw BadDegree("network needs at least one node");
    if (!(mean_degree >= 0.0) || (n > 1 && !(mean_degree < static_cast<double>(n))) || (n == 1 && mean_degree != 0.0)) {
        std::ostringstream os;
        os << "mean degree " << mean_degree << " not in [0, N) for N=" << n;
        throw BadDegree(os.str());
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    if (n > 1 && mean_degree > 0.0) {
        const double pe = mean_degree / static_cast<double>(n - 1);
        Rng rng(seed);
        if (pe >= 1.0) return complete_graph(n);
        // Geometric skipping over the lower triangle (Batagelj and Brandes).
        const double lp = std::log1p(-pe);
        long v = 1, w = -1;
        const long nn = static_cast<long>(n);
        while (v < nn) {
            w += 1 + static_cast<long>(std::floor(std::log1p(-rng.uniform()) / lp));
            while (w >= v && v < nn) {
                w -= v;
                ++v;
            }
            if (v < nn) edges.emplace_back(static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(v));
        }
    }
    return make_network(n, std::move(edges));
}

Network complete_graph(std::size_t n) {
    if (n < 1) throw BadDegree("network needs at least one node");
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    edges.reserve(n * (n - 1) / 2);
    for (std::uint32_t u = 0; u < n; ++u) {
        for (std::uint32_t v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    }
    return make_network(n, std::move(edges));
}

Network from_edge_list(const std::string& path, std::size_t n_hint) {
    std::ifstream in(path);
    if (!in) throw FileParse("cannot open " + path);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::string line;
    std::size_t lineno = 0;
    std::size_t max_id = 0;
    bool any = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        long long a = -1, b = -1;
        std::string extra;
        if (!(ls >> a >> b) || (ls >> extra) || a < 0 || b < 0 ||
            a > std::numeric_limits<std::uint32_t>::max() || b > std::numeric_limits<std::uint32_t>::max()) {
            throw FileParse(path + ":" + std::to_string(lineno) + ": expected two nonnegative integers");
        }
        edges.emplace_back(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
        max_id = std::max<std::size_t>(max_id, static_cast<std::size_t>(std::max(a, b)));
        any = true;
    }
    const std::size_t n = std::max(n_hint, any ? max_id + 1 : std::size_t{0});
    if (n == 0) throw FileParse(path + ": no nodes");
    return make_network(n, std::move(edges));
}

namespace {

enum NodeState : std::uint8_t { kSus = 0, kInf = 1, kIso = 2 };

enum class EventType : std::uint8_t { Isolate, Release };

struct Event {
    double t;
    std::uint64_t seq;
    EventType type;
    std::uint32_t node;
    std::uint32_t epoch;
};

struct Later {
    bool operator()(const Event& a, const Event& b) const {
        if (a.t != b.t) return a.t > b.t;
        return a.seq > b.seq;
    }
};

}  // namespace

NetSeries simulate_network(const Network& net, const SimConfig& cfg) {
    if (!(cfg.beta >= 0.0) || !(cfg.gamma >= 0.0)) throw InvalidParams("rates must be nonnegative");
    if (!(cfg.p >= 0.0 && cfg.p <= 1.0)) throw InvalidParams("p must lie in [0, 1]");
    if (!(cfg.tau_days >= 0.0) || !(cfg.kappa_days >= 0.0)) throw InvalidParams("delays must be nonnegative");
    if (!(cfg.t_end_days > 0.0) || !(cfg.dt_out > 0.0)) throw InvalidParams("t_end and dt_out must be positive");
    if (cfg.initial_infected.empty()) throw InvalidParams("initial infected set is empty");

    const std::size_t n = net.n;
    std::vector<std::uint8_t> state(n, kSus);
    std::vector<std::uint32_t> epoch(n, 0);
    std::vector<int> gen(n, 0);
    std::vector<std::uint32_t> infected;
    std::vector<std::size_t> pos(n, 0);
    std::size_t max_deg = 1;
    for (const auto& a : net.adj) max_deg = std::max(max_deg, a.size());
    double deg_sum = 0.0;  // sum of degrees over infectious nodes
    std::size_t n_S = n, n_I = 0, n_Q = 0;

    Rng rng(cfg.seed);
    std::priority_queue<Event, std::vector<Event>, Later> queue;
    std::uint64_t seq = 0;
    NetSeries out;

    auto add_infected = [&](std::uint32_t v) {
        pos[v] = infected.size();
        infected.push_back(v);
        deg_sum += static_cast<double>(net.adj[v].size());
    };
    auto remove_infected = [&](std::uint32_t v) {
        const std::size_t i = pos[v];
        const std::uint32_t last = infected.back();
        infected[i] = last;
        pos[last] = i;
        infected.pop_back();
        deg_sum -= static_cast<double>(net.adj[v].size());
    };
    auto infect = [&](std::uint32_t v, double t, int generation, bool identify) {
        state[v] = kInf;
        ++epoch[v];
        gen[v] = generation;
        out.max_generation = std::max(out.max_generation, generation);
        --n_S;
        ++n_I;
        add_infected(v);
        if (identify && rng.bernoulli(cfg.p)) queue.push({t + cfg.tau_days, seq++, EventType::Isolate, v, epoch[v]});
    };

    for (std::uint32_t v : cfg.initial_infected) {
        if (v >= n) throw InvalidParams("initial infected node out of range");
        if (state[v] != kSus) throw InvalidParams("initial infected node listed twice");
        infect(v, 0.0, 0, cfg.isolate_initial);
    }

    const auto n_out = static_cast<std::size_t>(std::llround(cfg.t_end_days / cfg.dt_out));
    std::size_t next_out = 0;
    auto record_until = [&](double t_event) {
        while (next_out <= n_out && static_cast<double>(next_out) * cfg.dt_out < t_event) {
            out.t.push_back(static_cast<double>(next_out) * cfg.dt_out);
            out.S.push_back(static_cast<double>(n_S) / n);
            out.I.push_back(static_cast<double>(n_I) / n);
            out.Q.push_back(static_cast<double>(n_Q) / n);
            ++next_out;
        }
    };

    const double inf = std::numeric_limits<double>::infinity();
    double t = 0.0;
    const double t_stop = static_cast<double>(n_out) * cfg.dt_out;
    while (true) {
        const double rec_rate = cfg.gamma * static_cast<double>(n_I);
        const double inf_rate = cfg.beta * deg_sum;
        const double total = rec_rate + inf_rate;
        const double t_s = total > 0.0 ? t + rng.exponential(total) : inf;
        const double t_d = queue.empty() ? inf : queue.top().t;
        const double t_next = std::min(t_s, t_d);
        if (t_next > t_stop) {
            record_until(inf);
            break;
        }
        // Scheduled events win ties; the pending exponential draw is discarded, which is exact
        // because the clocks are memoryless.
        if (t_d <= t_s) {
            record_until(t_d);
            t = t_d;
            const Event ev = queue.top();
            queue.pop();
            ++out.events;
            if (ev.type == EventType::Isolate) {
                if (state[ev.node] == kInf && epoch[ev.node] == ev.epoch) {
                    state[ev.node] = kIso;
                    remove_infected(ev.node);
                    --n_I;
                    ++n_Q;
                    ++out.isolations;
                    queue.push({t + cfg.kappa_days, seq++, EventType::Release, ev.node, ev.epoch});
                }
            } else {
                state[ev.node] = kSus;
                --n_Q;
                ++n_S;
            }
            continue;
        }
        record_until(t_s);
        t = t_s;
        ++out.events;
        if (rng.uniform() * total < rec_rate) {
            const std::uint32_t v = infected[rng.below(infected.size())];
            state[v] = kSus;
            remove_infected(v);
            --n_I;
            ++n_S;
        } else {
            // Pick an infectious node with probability proportional to its degree, then a
            // neighbour uniformly; only S neighbours turn the attempt into a transmission.
            std::uint32_t v;
            while (true) {
                v = infected[rng.below(infected.size())];
                if (rng.uniform() * static_cast<double>(max_deg) < static_cast<double>(net.adj[v].size())) break;
            }
            const auto& nb = net.adj[v];
            const std::uint32_t u = nb[rng.below(nb.size())];
            if (state[u] == kSus) {
                ++out.infections;
                infect(u, t, gen[v] + 1, true);
            }
        }
    }
    return out;
}

NetSeries simulate_network_mean(const Network& net, SimConfig cfg, std::size_t replicas, unsigned threads) {
    if (replicas == 0) throw InvalidParams("need at least one replica");
    std::vector<NetSeries> runs(replicas);
    if (threads == 0) threads = default_thread_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, replicas));
    std::atomic<std::size_t> next{0};
    const std::uint64_t seed0 = cfg.seed;
    auto worker = [&]() {
        for (std::size_t i = next++; i < replicas; i = next++) {
            SimConfig c = cfg;
            c.seed = seed0 + i;
            runs[i] = simulate_network(net, c);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    NetSeries mean = runs[0];
    for (std::size_t i = 1; i < replicas; ++i) {
        for (std::size_t k = 0; k < mean.t.size(); ++k) {
            mean.S[k] += runs[i].S[k];
            mean.I[k] += runs[i].I[k];
            mean.Q[k] += runs[i].Q[k];
        }
        mean.events += runs[i].events;
        mean.infections += runs[i].infections;
        mean.isolations += runs[i].isolations;
        mean.max_generation = std::max(mean.max_generation, runs[i].max_generation);
    }
    const double inv = 1.0 / static_cast<double>(replicas);
    for (std::size_t k = 0; k < mean.t.size(); ++k) {
        mean.S[k] *= inv;
        mean.I[k] *= inv;
        mean.Q[k] *= inv;
    }
    return mean;
}

MeanFieldParams mean_field_params(double beta, double mean_degree, double gamma, double p, double tau_days,
                                  double kappa_days) {
    if (!(gamma > 0.0)) throw InvalidParams("gamma must be positive");
    MeanFieldParams m;
    m.r = beta * mean_degree / gamma;
    m.tau = gamma * tau_days;
    m.kappa = gamma * kappa_days;
    m.eps = p * std::exp(-gamma * tau_days);
    m.time_scale = gamma;
    return m;
}

std::vector<std::uint32_t> random_nodes(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k > n) throw InvalidParams("cannot pick more nodes than the network has");
    std::vector<std::uint32_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<std::uint32_t>(i);
    Rng rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + rng.below(n - i);
        std::swap(ids[i], ids[j]);
    }
    ids.resize(k);
    return ids;
}

}  // namespace siq
