#include "animarl/episode.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "animarl/errors.hpp"
#include "animarl/rng.hpp"

namespace animarl {

using nlohmann::json;

std::vector<std::vector<double>> Episode::position_features() const {
    std::vector<std::vector<double>> feats(length());
    for (std::size_t t = 0; t < length(); ++t) {
        feats[t].reserve(agents.size() * 2);
        for (const auto& a : agents) {
            feats[t].push_back(a.positions[t].x);
            feats[t].push_back(a.positions[t].y);
        }
    }
    return feats;
}

std::vector<double> Episode::start_position_features() const {
    std::vector<double> s;
    s.reserve(agents.size() * 2);
    for (const auto& a : agents) {
        if (a.positions.empty()) throw ContractError("Episode: empty agent trajectory");
        s.push_back(a.positions[0].x);
        s.push_back(a.positions[0].y);
    }
    return s;
}

std::vector<AgentState> Episode::state_at(std::size_t t) const {
    std::vector<AgentState> states(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) {
        states[i].position = agents[i].positions.at(t);
        states[i].velocity = agents[i].velocities.at(t);
        states[i].role = agents[i].role;
        states[i].alive = true;
    }
    return states;
}

void Episode::validate() const {
    if (agents.empty()) throw ContractError("Episode: no agents");
    std::size_t len = agents[0].positions.size();
    if (len == 0) throw ContractError("Episode: empty trajectory");
    for (const auto& a : agents) {
        if (a.positions.size() != len || a.velocities.size() != len)
            throw ContractError("Episode: agent sequences have unequal lengths");
        if (!a.actions.empty() && a.actions.size() != len - 1)
            throw ContractError("Episode: action labels must have length-1 entries");
        for (const Vec2& p : a.positions)
            if (!p.finite()) throw InvalidStateError("Episode: non-finite position");
        for (const Vec2& v : a.velocities)
            if (!v.finite()) throw InvalidStateError("Episode: non-finite velocity");
    }
    if (condition != 0 && condition != 1) throw ContractError("Episode: condition must be 0 or 1");
    if (!(dt > 0)) throw ContractError("Episode: dt must be positive");
}

std::string to_string(TerminationCause cause) {
    switch (cause) {
        case TerminationCause::Contact: return "contact";
        case TerminationCause::Timeout: return "timeout";
        case TerminationCause::Boundary: return "boundary";
        case TerminationCause::None: return "none";
    }
    return "none";
}

TerminationCause cause_from_string(const std::string& s) {
    if (s == "contact") return TerminationCause::Contact;
    if (s == "timeout") return TerminationCause::Timeout;
    if (s == "boundary") return TerminationCause::Boundary;
    if (s == "none") return TerminationCause::None;
    throw FormatError("unknown termination cause: " + s);
}

std::string to_string(Role role) { return role == Role::Chaser ? "chaser" : "evader"; }

Role role_from_string(const std::string& s) {
    if (s == "chaser") return Role::Chaser;
    if (s == "evader") return Role::Evader;
    throw FormatError("unknown role: " + s);
}

namespace {

constexpr const char* kSchemaName = "animarl-episodes";
constexpr int kSchemaVersion = 1;

json episode_to_json(const Episode& e) {
    json j;
    j["id"] = e.episode_id;
    j["condition"] = e.condition;
    j["dt"] = e.dt;
    j["outcome"] = to_string(e.outcome);
    j["winner"] = to_string(e.winner);
    json agents = json::array();
    for (const auto& a : e.agents) {
        json ja;
        ja["role"] = to_string(a.role);
        json p = json::array(), v = json::array();
        for (const Vec2& x : a.positions) p.push_back(json::array({x.x, x.y}));
        for (const Vec2& x : a.velocities) v.push_back(json::array({x.x, x.y}));
        ja["p"] = std::move(p);
        ja["v"] = std::move(v);
        if (!a.actions.empty()) ja["a"] = a.actions;
        agents.push_back(std::move(ja));
    }
    j["agents"] = std::move(agents);
    return j;
}

Episode episode_from_json(const json& j) {
    Episode e;
    e.episode_id = j.at("id").get<long>();
    e.condition = j.at("condition").get<int>();
    e.dt = j.at("dt").get<double>();
    e.outcome = cause_from_string(j.at("outcome").get<std::string>());
    e.winner = role_from_string(j.at("winner").get<std::string>());
    for (const json& ja : j.at("agents")) {
        AgentTrajectory a;
        a.role = role_from_string(ja.at("role").get<std::string>());
        for (const json& p : ja.at("p")) a.positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        for (const json& v : ja.at("v")) a.velocities.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        if (ja.contains("a")) a.actions = ja.at("a").get<std::vector<int>>();
        e.agents.push_back(std::move(a));
    }
    e.validate();
    return e;
}

}  // namespace

void write_dataset(const std::vector<Episode>& episodes, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open dataset file for writing: " + path);
    json header;
    header["schema"] = kSchemaName;
    header["version"] = kSchemaVersion;
    out << header.dump() << "\n";
    for (const Episode& e : episodes) {
        e.validate();
        out << episode_to_json(e).dump() << "\n";
    }
    if (!out) throw IoError("failed writing dataset file: " + path);
}

std::vector<Episode> read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset file: " + path);
    std::string line;
    int lineno = 0;
    std::vector<Episode> episodes;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& ex) {
            throw IoError("dataset parse error at " + path + " line " + std::to_string(lineno) +
                          ": " + ex.what());
        }
        if (lineno == 1) {
            if (!j.is_object() || j.value("schema", "") != kSchemaName)
                throw FormatError("dataset " + path + ": missing schema header");
            if (j.value("version", -1) != kSchemaVersion)
                throw FormatError("dataset " + path + ": unsupported schema version " +
                                  std::to_string(j.value("version", -1)));
            continue;
        }
        try {
            episodes.push_back(episode_from_json(j));
        } catch (const json::exception& ex) {
            throw IoError("dataset field error at " + path + " line " + std::to_string(lineno) +
                          ": " + ex.what());
        }
    }
    if (lineno == 0) throw FormatError("dataset " + path + ": empty file (missing header)");
    return episodes;
}

Episode downsample(const Episode& episode, int stride) {
    if (stride < 1) throw ContractError("downsample: stride must be >= 1");
    if (stride == 1) return episode;
    Episode out = episode;
    out.dt = episode.dt * stride;
    for (std::size_t i = 0; i < episode.agents.size(); ++i) {
        auto& a = out.agents[i];
        a.positions.clear();
        a.velocities.clear();
        a.actions.clear();
        for (std::size_t t = 0; t < episode.agents[i].positions.size(); t += stride) {
            a.positions.push_back(episode.agents[i].positions[t]);
            a.velocities.push_back(episode.agents[i].velocities[t]);
        }
    }
    return out;
}

TrajectoryBatch velocity_batch(const std::vector<Episode>& episodes, Role role) {
    TrajectoryBatch batch;
    if (!episodes.empty()) batch.dt = episodes[0].dt;
    for (const Episode& e : episodes) {
        if (e.dt != batch.dt)
            throw ContractError("velocity_batch: episodes with mixed sampling intervals");
        for (const auto& a : e.agents)
            if (a.role == role) batch.tracks.push_back(a.velocities);
    }
    return batch;
}

void SplitSpec::validate_isolation() const {
    auto check = [](const StageSplit& s, const std::string& name) {
        std::set<long> train(s.train_ids.begin(), s.train_ids.end());
        for (long id : s.test_ids)
            if (train.count(id))
                throw ContractError("split stage '" + name + "': test id " + std::to_string(id) +
                                    " also appears in training");
    };
    check(estimation, "estimation");
    check(offline, "offline");
    check(online, "online");
}

StageSplit make_splits(const std::vector<Episode>& episodes, const SplitCounts& counts,
                       std::uint64_t seed) {
    if (counts.train < 0 || counts.validation < 0 || counts.test < 0)
        throw ContractError("make_splits: negative counts");
    if (static_cast<std::size_t>(counts.train + counts.validation + counts.test) > episodes.size())
        throw ContractError("make_splits: requested counts exceed dataset size");

    std::vector<long> ids_by_cond[2];
    for (const Episode& e : episodes) ids_by_cond[e.condition].push_back(e.episode_id);
    int n_cond = ids_by_cond[1].empty() ? 1 : 2;

    Rng rng(seed);
    for (auto& ids : ids_by_cond) {
        std::sort(ids.begin(), ids.end());
        for (std::size_t i = ids.size(); i > 1; --i)
            std::swap(ids[i - 1], ids[rng.uniform_index(i)]);
    }

    auto share = [n_cond](int total, int cond) {
        int base = total / n_cond;
        return base + (cond < total % n_cond ? 1 : 0);
    };

    StageSplit split;
    for (int c = 0; c < n_cond; ++c) {
        const auto& ids = ids_by_cond[c];
        int tr = share(counts.train, c), va = share(counts.validation, c), te = share(counts.test, c);
        if (static_cast<std::size_t>(tr + va + te) > ids.size())
            throw ContractError("make_splits: per-condition counts infeasible for condition " +
                                std::to_string(c));
        split.train_ids.insert(split.train_ids.end(), ids.begin(), ids.begin() + tr);
        split.validation_ids.insert(split.validation_ids.end(), ids.begin() + tr,
                                    ids.begin() + tr + va);
        // Test episodes come from the far end of the permutation so that a
        // stage with smaller counts never leaks its test ids into training.
        split.test_ids.insert(split.test_ids.end(), ids.end() - te, ids.end());
    }
    std::sort(split.train_ids.begin(), split.train_ids.end());
    std::sort(split.validation_ids.begin(), split.validation_ids.end());
    std::sort(split.test_ids.begin(), split.test_ids.end());
    return split;
}

SplitSpec default_split_spec(const std::vector<Episode>& episodes, std::uint64_t seed) {
    SplitSpec spec;
    spec.estimation = make_splits(episodes, {400, 50, 50}, seed);
    spec.offline = spec.estimation;
    std::vector<long> pool = spec.offline.validation_ids;
    pool.insert(pool.end(), spec.offline.test_ids.begin(), spec.offline.test_ids.end());
    std::size_t n_train = std::min<std::size_t>(50, pool.size());
    spec.online.train_ids.assign(pool.begin(), pool.begin() + n_train);
    const auto& te = spec.offline.test_ids;
    std::size_t n_test = std::min<std::size_t>(10, te.size());
    spec.online.test_ids.assign(te.end() - n_test, te.end());
    // Drop any online-test id that slipped into the online-train slice.
    std::set<long> test_set(spec.online.test_ids.begin(), spec.online.test_ids.end());
    std::erase_if(spec.online.train_ids, [&](long id) { return test_set.count(id) > 0; });
    spec.validate_isolation();
    return spec;
}

std::vector<Episode> select_episodes(const std::vector<Episode>& episodes,
                                     const std::vector<long>& ids) {
    std::unordered_map<long, const Episode*> by_id;
    for (const Episode& e : episodes) by_id[e.episode_id] = &e;
    std::vector<Episode> out;
    out.reserve(ids.size());
    for (long id : ids) {
        auto it = by_id.find(id);
        if (it == by_id.end())
            throw ContractError("select_episodes: unknown episode id " + std::to_string(id));
        out.push_back(*it->second);
    }
    return out;
}

}  // namespace animarl
