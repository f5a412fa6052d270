#include "animarl/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

#include "animarl/demo_gen.hpp"
#include "animarl/dtw.hpp"
#include "animarl/errors.hpp"

namespace animarl {

Method method_from_string(const std::string& s) {
    if (s == "dqn") return Method::DQN;
    if (s == "bc") return Method::BC;
    if (s == "dqaas") return Method::DQAAS;
    if (s == "dqdil") return Method::DQDIL;
    if (s == "dqcil") return Method::DQCIL;
    throw ContractError("unknown method: " + s);
}

std::string to_string(Method m) {
    switch (m) {
        case Method::DQN: return "dqn";
        case Method::BC: return "bc";
        case Method::DQAAS: return "dqaas";
        case Method::DQDIL: return "dqdil";
        case Method::DQCIL: return "dqcil";
    }
    return "dqn";
}

bool method_uses_demos(Method m) { return m != Method::DQN; }

int greedy_action(const std::vector<double>& q) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(q.size()); ++k)
        if (q[k] > q[best]) best = k;
    return best;
}

QNetPolicy::QNetPolicy(const QNet& net) : net_(&net), hidden_(net.zero_hidden()) {}

void QNetPolicy::begin_episode() { hidden_ = net_->zero_hidden(); }

int QNetPolicy::act(const std::vector<double>& obs, double eps, Rng& rng) {
    QNet::Forward f = net_->forward(obs, hidden_);
    hidden_ = f.hidden;
    double u_explore = rng.uniform();
    double u_action = rng.uniform();
    if (u_explore < eps)
        return static_cast<int>(u_action * net_->n_actions()) % net_->n_actions();
    return greedy_action(f.q);
}

TrainLog::TrainLog(const std::string& path) : path_(path) {
    if (path_.empty()) return;
    std::ofstream out(path_);
    if (!out) throw IoError("cannot open training log: " + path_);
    out << "phase,env_steps,epoch,loss_td,loss_l2,loss_tr,loss_sup,epsilon,mean_return,"
           "eval_return\n";
}

void TrainLog::row(const std::string& phase, long env_steps, int epoch, double loss_td,
                   double loss_l2, double loss_tr, double loss_sup, double eps,
                   double mean_return, double eval_return) {
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::app);
    if (!out) throw IoError("cannot append to training log: " + path_);
    out << phase << "," << env_steps << "," << epoch << "," << format_double(loss_td) << ","
        << format_double(loss_l2) << "," << format_double(loss_tr) << ","
        << format_double(loss_sup) << "," << format_double(eps) << ","
        << format_double(mean_return) << "," << format_double(eval_return) << "\n";
}

namespace {

std::vector<const Episode*> pool_for_condition(const std::vector<Episode>& demos, int condition) {
    std::vector<const Episode*> pool;
    for (const Episode& e : demos)
        if (e.condition == condition) pool.push_back(&e);
    if (pool.empty())
        for (const Episode& e : demos) pool.push_back(&e);
    return pool;
}

std::vector<const Episode*> whole_pool(const std::vector<Episode>& demos) {
    std::vector<const Episode*> pool;
    pool.reserve(demos.size());
    for (const Episode& e : demos) pool.push_back(&e);
    return pool;
}

int evader_agent_index(const Episode& e) {
    for (std::size_t i = 0; i < e.agents.size(); ++i)
        if (e.agents[i].role == Role::Evader) return static_cast<int>(i);
    return -1;
}

int anchor_action_at(const Episode& anchor, int agent_index, std::size_t sample_index) {
    const auto& actions = anchor.agents.at(agent_index).actions;
    if (actions.empty()) return -1;
    std::size_t idx = std::min(sample_index, actions.size() - 1);
    return actions[idx];
}

LossSpec loss_spec_for(Method method, const TrainConfig& t, bool offline) {
    LossSpec spec;
    spec.weights.lambda1 = t.lambda1;
    spec.weights.gamma = t.gamma;
    switch (method) {
        case Method::DQN:
        case Method::DQDIL:
            break;
        case Method::DQCIL:
            spec.use_treatment = true;
            spec.weights.lambda2 = offline ? t.lambda2_offline : t.lambda2_online;
            break;
        case Method::DQAAS:
            spec.use_supervised = true;
            spec.supervise_aligned = true;
            spec.weights.lambda3 = offline ? t.lambda3_offline : t.lambda3_online;
            break;
        case Method::BC:
            spec.use_td = false;
            spec.use_supervised = true;
            break;
    }
    return spec;
}

double method_lr(Method method, const TrainConfig& t, bool offline, bool pretrained) {
    if (method == Method::BC || method == Method::DQAAS) return t.lr_supervised;
    if (offline) return t.lr_offline;
    return pretrained ? t.lr_online : t.lr_online_scratch;
}

std::vector<QBatchItem> materialize_batch(const ReplayBuffer& buf,
                                          const ReplayBuffer::Sample& sample) {
    std::vector<QBatchItem> batch;
    batch.reserve(sample.indices.size());
    for (std::size_t b = 0; b < sample.indices.size(); ++b) {
        const Transition& tr = buf.at(sample.indices[b]);
        QBatchItem it;
        it.obs = tr.obs;
        it.next_obs = tr.next_obs;
        it.h_prev = tr.h_prev;
        it.h_cur = tr.h_cur;
        it.action = tr.action;
        it.reward = tr.reward;
        it.terminal = tr.terminal;
        it.condition = tr.condition;
        it.aligned_action = tr.aligned_action;
        it.weight = sample.weights[b];
        batch.push_back(std::move(it));
    }
    return batch;
}

std::vector<QBatchItem> items_to_batch(const std::vector<Transition>& items,
                                       const std::vector<std::size_t>& order, std::size_t first,
                                       std::size_t count) {
    std::vector<QBatchItem> batch;
    batch.reserve(count);
    for (std::size_t i = first; i < first + count; ++i) {
        const Transition& tr = items[order[i]];
        QBatchItem it;
        it.obs = tr.obs;
        it.next_obs = tr.next_obs;
        it.h_prev = tr.h_prev;
        it.h_cur = tr.h_cur;
        it.action = tr.action;
        it.reward = tr.reward;
        it.terminal = tr.terminal;
        it.condition = tr.condition;
        it.aligned_action = tr.aligned_action;
        it.weight = 1.0;
        batch.push_back(std::move(it));
    }
    return batch;
}

std::vector<double> state_features(const std::vector<AgentState>& states) {
    std::vector<double> f;
    f.reserve(states.size() * 2);
    for (const auto& s : states) {
        f.push_back(s.position.x);
        f.push_back(s.position.y);
    }
    return f;
}

}  // namespace

DemoTransitions build_demo_transitions(const std::vector<Episode>& demos, int agent_index,
                                       const WorldConfig& cfg, double alpha,
                                       const std::vector<Episode>& anchor_pool,
                                       bool aligned_labels) {
    if (demos.empty()) throw ContractError("build_demo_transitions: empty demonstration set");
    DemoTransitions out;
    std::vector<const Episode*> pools[2] = {pool_for_condition(anchor_pool, 0),
                                            pool_for_condition(anchor_pool, 1)};
    for (const Episode& e : demos) {
        if (e.length() < 2) continue;
        if (agent_index < 0 || agent_index >= static_cast<int>(e.agents.size()))
            throw ContractError("build_demo_transitions: agent index out of range");
        if (e.agents[agent_index].actions.empty())
            throw ContractError("build_demo_transitions: demonstration lacks action labels");

        const Episode* anchor = match_expert(e.start_position_features(), pools[e.condition]);
        WarpState warp(anchor->position_features());
        warp.append_step(e.position_features().front());

        DemoTransitions::Group group;
        group.first = out.items.size();

        std::vector<AgentState> cur = e.state_at(0);
        auto feats = e.position_features();
        for (std::size_t t = 0; t + 1 < e.length(); ++t) {
            std::vector<int> joint(e.agents.size(), 0);
            for (std::size_t i = 0; i < e.agents.size(); ++i) {
                if (e.agents[i].actions.empty())
                    throw ContractError("build_demo_transitions: unlabeled co-agent actions");
                joint[i] = e.agents[i].actions[t];
            }
            StepOutcome sim = step(cur, joint, cfg, static_cast<double>(t) * cfg.dt);
            double pseudo = warp.append_step(feats[t + 1]);

            Transition tr;
            tr.obs = observe(cur, agent_index, e.condition);
            std::vector<AgentState> next = e.state_at(t + 1);
            tr.next_obs = observe(next, agent_index, e.condition);
            tr.action = joint[agent_index];
            tr.reward = mix_reward(sim.rewards[agent_index], pseudo, alpha);
            tr.terminal = t + 2 == e.length();
            tr.condition = e.condition;
            tr.episode_id = e.episode_id;
            tr.step_index = static_cast<int>(t);
            if (aligned_labels) {
                int a = anchor_action_at(*anchor, agent_index, warp.aligned_index());
                tr.aligned_action = a >= 0 ? a : tr.action;
            }
            out.items.push_back(std::move(tr));
            cur = std::move(next);
        }
        group.count = out.items.size() - group.first;
        if (group.count > 0) out.groups.push_back(group);
    }
    return out;
}

void refresh_hidden_states(DemoTransitions& data, const QNet& net) {
    for (const auto& g : data.groups) {
        std::vector<double> h = net.zero_hidden();
        for (std::size_t i = g.first; i < g.first + g.count; ++i) {
            Transition& tr = data.items[i];
            tr.h_prev = h;
            QNet::Forward f = net.forward(tr.obs, h);
            h = f.hidden;
            tr.h_cur = h;
        }
    }
}

QNet pretrain_offline(const std::vector<Episode>& demos, int agent_index, Method method,
                      const RunConfig& cfg, std::uint64_t seed, TrainLog* log) {
    cfg.validate();
    const int obs_dim = observation_dim(cfg.world.n_agents());
    QNet net(obs_dim);
    Rng init_rng(seed, 7001 + static_cast<std::uint64_t>(agent_index));
    net.init_params(init_rng);
    if (method == Method::DQN) return net;  // no demonstration phase

    if (demos.empty()) throw ContractError("pretrain_offline: empty demonstration set");
    double alpha = (method == Method::DQDIL || method == Method::DQCIL) ? cfg.train.alpha_offline
                                                                        : 0.0;
    DemoTransitions data = build_demo_transitions(demos, agent_index, cfg.world, alpha, demos,
                                                  method == Method::DQAAS);
    if (data.items.empty()) throw ContractError("pretrain_offline: no usable transitions");

    LossSpec spec = loss_spec_for(method, cfg.train, true);
    double lr = method_lr(method, cfg.train, true, false);
    QNet target = net;
    Adam adam(net.params().size());
    Rng shuffle_rng(seed, 7101 + static_cast<std::uint64_t>(agent_index));
    std::vector<std::size_t> order(data.items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    const std::size_t batch_size = static_cast<std::size_t>(cfg.train.batch_size);
    long opt_steps = 0;
    for (int epoch = 1; epoch <= cfg.train.offline_epochs; ++epoch) {
        refresh_hidden_states(data, net);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.uniform_index(i)]);

        double td = 0, l2 = 0, tr = 0, sup = 0;
        long batches = 0;
        for (std::size_t first = 0; first < order.size(); first += batch_size) {
            std::size_t count = std::min(batch_size, order.size() - first);
            auto batch = items_to_batch(data.items, order, first, count);
            BackwardResult res = backward_with_reversal(net, target, batch, spec);
            adam.step(net.params(), res.grad, lr);
            ++opt_steps;
            if (opt_steps % cfg.train.schedule.target_sync_interval == 0) target = net;
            td += res.loss_td;
            l2 += res.loss_l2;
            tr += res.loss_tr;
            sup += res.loss_sup;
            ++batches;
        }
        if (log && batches > 0)
            log->row("offline", 0, epoch, td / batches, l2 / batches, tr / batches, sup / batches,
                     0.0, 0.0, 0.0);
    }
    return net;
}

std::vector<Episode> rollout(const std::vector<Policy*>& chaser_policies, const WorldConfig& cfg,
                             const RolloutOptions& opt) {
    cfg.validate();
    if (chaser_policies.size() != static_cast<std::size_t>(cfg.n_chasers))
        throw ContractError("rollout: need one policy per chaser");
    if (opt.condition != 0 && opt.condition != 1)
        throw ContractError("rollout: condition flag must be 0 or 1");

    std::vector<const Episode*> evader_pool;
    if (opt.demo_pool) evader_pool = whole_pool(*opt.demo_pool);

    std::vector<Episode> episodes;
    episodes.reserve(opt.n_episodes);
    Environment env(cfg);
    for (int ep = 0; ep < opt.n_episodes; ++ep) {
        if (opt.start_pool && !opt.start_pool->empty()) {
            const Episode& src = (*opt.start_pool)[ep % opt.start_pool->size()];
            env.reset_to(src.state_at(0));
        } else {
            env.reset(derive_seed(opt.seed, static_cast<std::uint64_t>(ep)));
        }

        const Episode* anchor = nullptr;
        if (!evader_pool.empty())
            anchor = match_expert(state_features(env.states()), evader_pool);
        int anchor_evader = anchor ? evader_agent_index(*anchor) : -1;

        std::vector<Rng> agent_rngs;
        for (int k = 0; k < cfg.n_chasers; ++k)
            agent_rngs.emplace_back(opt.seed,
                                    0x50000ULL + static_cast<std::uint64_t>(ep) * 64 + k);
        for (auto* p : chaser_policies) p->begin_episode();

        Episode rec;
        rec.episode_id = opt.id_start + ep;
        rec.condition = opt.condition;
        rec.dt = cfg.dt;
        rec.agents.resize(cfg.n_agents());
        for (int i = 0; i < cfg.n_agents(); ++i) {
            rec.agents[i].role = env.states()[i].role;
            rec.agents[i].positions.push_back(env.states()[i].position);
            rec.agents[i].velocities.push_back(env.states()[i].velocity);
        }

        int t = 0;
        while (!env.done()) {
            std::vector<int> joint(cfg.n_agents(), 0);
            int chaser_ord = 0;
            for (int i = 0; i < cfg.n_agents(); ++i) {
                if (env.states()[i].role == Role::Chaser) {
                    std::vector<double> obs = observe(env.states(), i, opt.condition);
                    joint[i] = chaser_policies[chaser_ord]->act(obs, opt.eps,
                                                                agent_rngs[chaser_ord]);
                    ++chaser_ord;
                } else {
                    int a = -1;
                    if (anchor && anchor_evader >= 0) {
                        const auto& acts = anchor->agents[anchor_evader].actions;
                        if (static_cast<std::size_t>(t) < acts.size()) a = acts[t];
                    }
                    joint[i] = a >= 0 ? a : scripted_evader_action(env.states(), i, cfg);
                }
            }
            env.step(joint);
            for (int i = 0; i < cfg.n_agents(); ++i) {
                rec.agents[i].actions.push_back(joint[i]);
                rec.agents[i].positions.push_back(env.states()[i].position);
                rec.agents[i].velocities.push_back(env.states()[i].velocity);
            }
            ++t;
        }
        rec.outcome = env.cause();
        rec.winner = env.winner();
        rec.validate();
        episodes.push_back(std::move(rec));
    }
    return episodes;
}

std::vector<Episode> rollout_nets(const std::vector<QNet>& chaser_nets, const WorldConfig& cfg,
                                  const RolloutOptions& opt) {
    std::vector<QNetPolicy> policies;
    policies.reserve(chaser_nets.size());
    for (const QNet& n : chaser_nets) policies.emplace_back(n);
    std::vector<Policy*> ptrs;
    for (auto& p : policies) ptrs.push_back(&p);
    return rollout(ptrs, cfg, opt);
}

void ensure_action_labels(std::vector<Episode>& episodes, const WorldConfig& cfg) {
    (void)cfg;
    for (Role role : {Role::Chaser, Role::Evader}) {
        bool missing = false;
        for (const Episode& e : episodes)
            for (const auto& a : e.agents)
                if (a.role == role && a.actions.empty() && a.positions.size() >= 2) missing = true;
        if (!missing) continue;
        TrajectoryBatch batch = velocity_batch(episodes, role);
        LocomotionParams params = estimate(batch);
        for (Episode& e : episodes)
            for (auto& a : e.agents)
                if (a.role == role && a.actions.empty() && a.positions.size() >= 2)
                    a.actions = infer_actions_track(a.velocities, params, e.dt);
    }
}

TrainOutcome train(const RunConfig& cfg, const TrainOptions& opt,
                   const std::vector<Episode>& demos) {
    cfg.validate();
    const WorldConfig& world = cfg.world;
    const TrainConfig& tc = cfg.train;
    const int n_chasers = world.n_chasers;
    const int obs_dim = observation_dim(world.n_agents());
    const Method method = opt.method;

    if (method_uses_demos(method) && demos.empty())
        throw ContractError("train: method " + to_string(method) + " requires demonstrations");

    TrainLog log(opt.log_path);
    TrainOutcome out;

    // --- offline phase ---
    if (opt.pretrain || method == Method::BC) {
        for (int k = 0; k < n_chasers; ++k)
            out.nets.push_back(pretrain_offline(demos, k, method, cfg, opt.seed,
                                                k == 0 ? &log : nullptr));
        out.offline_epochs_run = method == Method::DQN ? 0 : tc.offline_epochs;
    } else {
        for (int k = 0; k < n_chasers; ++k) {
            QNet net(obs_dim);
            Rng init_rng(opt.seed, 7001 + static_cast<std::uint64_t>(k));
            net.init_params(init_rng);
            out.nets.push_back(std::move(net));
        }
    }

    if (method == Method::BC) return out;  // purely supervised: no environment interaction

    long total_steps = opt.online_steps >= 0 ? opt.online_steps : tc.schedule.total_steps;
    if (total_steps == 0) return out;

    // --- online phase ---
    const bool pretrained = opt.pretrain;
    const double lr = method_lr(method, tc, false, pretrained);
    LossSpec spec = loss_spec_for(method, tc, false);
    const double alpha = (method == Method::DQDIL || method == Method::DQCIL) ? tc.alpha_online
                                                                              : 0.0;
    const bool needs_warp =
        method == Method::DQDIL || method == Method::DQCIL || method == Method::DQAAS;

    std::vector<QNet> targets = out.nets;
    std::vector<Adam> adams;
    std::vector<ReplayBuffer> buffers;
    std::vector<Rng> explore_rngs;
    for (int k = 0; k < n_chasers; ++k) {
        adams.emplace_back(out.nets[k].params().size());
        buffers.emplace_back(static_cast<std::size_t>(tc.replay_capacity), tc.per_alpha,
                             derive_seed(opt.seed, 0xB0000 + k));
        explore_rngs.emplace_back(opt.seed, 0xA11 + static_cast<std::uint64_t>(k));
    }

    std::vector<DemoTransitions> demo_data(n_chasers);
    if (method_uses_demos(method)) {
        for (int k = 0; k < n_chasers; ++k) {
            demo_data[k] = build_demo_transitions(demos, k, world, alpha, demos,
                                                  method == Method::DQAAS);
            refresh_hidden_states(demo_data[k], out.nets[k]);
            for (const Transition& tr : demo_data[k].items) buffers[k].push_demo(tr);
        }
    }

    std::vector<const Episode*> cond_pools[2] = {pool_for_condition(demos, 0),
                                                 pool_for_condition(demos, 1)};
    std::vector<const Episode*> evader_pool = whole_pool(demos);

    Environment env(world);
    long step = 0;
    long ep_counter = 0;
    double return_avg = 0.0;
    long return_count = 0;
    double last_eval = 0.0;
    double td_acc = 0, l2_acc = 0, tr_acc = 0, sup_acc = 0;
    long loss_count = 0;
    const long log_interval = 1000;

    while (step < total_steps) {
        int condition = static_cast<int>(ep_counter % 2);
        env.reset(derive_seed(opt.seed, 0xE0000000ULL + static_cast<std::uint64_t>(ep_counter)));

        const Episode* anchor_dtw = nullptr;
        const Episode* anchor_evader = nullptr;
        if (!demos.empty()) {
            std::vector<double> start = state_features(env.states());
            if (needs_warp) anchor_dtw = match_expert(start, cond_pools[condition]);
            anchor_evader = match_expert(start, evader_pool);
            if (anchor_dtw) {
                std::vector<double> a0 = anchor_dtw->start_position_features();
                double d2 = 0;
                for (std::size_t i = 0; i < a0.size(); ++i) {
                    double d = a0[i] - start[i];
                    d2 += d * d;
                }
                if (std::sqrt(d2) > tc.anchor_distance_warn) ++out.anchor_warnings;
            }
        }
        int anchor_evader_idx = anchor_evader ? evader_agent_index(*anchor_evader) : -1;

        std::optional<WarpState> warp;
        if (needs_warp && anchor_dtw) {
            warp.emplace(anchor_dtw->position_features());
            warp->append_step(state_features(env.states()));
        }

        std::vector<std::vector<double>> hiddens;
        for (int k = 0; k < n_chasers; ++k) hiddens.push_back(out.nets[k].zero_hidden());

        int t = 0;
        bool episode_contact = false;
        while (!env.done() && step < total_steps) {
            double eps = tc.schedule.epsilon_at(step);
            std::vector<int> joint(world.n_agents(), 0);
            std::vector<std::vector<double>> obs_k(n_chasers), hprev_k(n_chasers);
            int chaser_ord = 0;
            for (int i = 0; i < world.n_agents(); ++i) {
                if (env.states()[i].role == Role::Chaser) {
                    int k = chaser_ord++;
                    obs_k[k] = observe(env.states(), i, condition);
                    hprev_k[k] = hiddens[k];
                    QNet::Forward f = out.nets[k].forward(obs_k[k], hiddens[k]);
                    hiddens[k] = f.hidden;
                    double u_explore = explore_rngs[k].uniform();
                    double u_action = explore_rngs[k].uniform();
                    joint[i] = u_explore < eps
                                   ? static_cast<int>(u_action * kNumActions) % kNumActions
                                   : greedy_action(f.q);
                } else {
                    int a = -1;
                    if (anchor_evader && anchor_evader_idx >= 0) {
                        const auto& acts = anchor_evader->agents[anchor_evader_idx].actions;
                        if (static_cast<std::size_t>(t) < acts.size()) a = acts[t];
                    }
                    joint[i] = a >= 0 ? a : scripted_evader_action(env.states(), i, world);
                }
            }

            StepOutcome sout = env.step(joint);
            if (sout.cause == TerminationCause::Contact) episode_contact = true;
            double pseudo = warp ? warp->append_step(state_features(env.states())) : 0.0;

            chaser_ord = 0;
            for (int i = 0; i < world.n_agents(); ++i) {
                if (env.states()[i].role != Role::Chaser) continue;
                int k = chaser_ord++;
                Transition tr;
                tr.obs = std::move(obs_k[k]);
                tr.next_obs = observe(env.states(), i, condition);
                tr.h_prev = std::move(hprev_k[k]);
                tr.h_cur = hiddens[k];
                tr.action = joint[i];
                tr.reward = alpha > 0 ? mix_reward(sout.rewards[i], pseudo, alpha)
                                      : sout.rewards[i];
                tr.terminal = sout.terminated;
                tr.condition = condition;
                tr.episode_id = ep_counter;
                tr.step_index = t;
                if (method == Method::DQAAS && anchor_dtw)
                    tr.aligned_action = anchor_action_at(*anchor_dtw, i, warp->aligned_index());
                buffers[k].push(std::move(tr));
            }

            ++step;
            ++t;

            if (step > tc.warmup_steps) {
                double frac = std::min(1.0, static_cast<double>(step) /
                                                static_cast<double>(total_steps));
                double beta = tc.per_beta_start + (tc.per_beta_end - tc.per_beta_start) * frac;
                for (int k = 0; k < n_chasers; ++k) {
                    if (buffers[k].size() < static_cast<std::size_t>(tc.batch_size)) continue;
                    ReplayBuffer::Sample sample =
                        buffers[k].sample(static_cast<std::size_t>(tc.batch_size), beta);
                    auto batch = materialize_batch(buffers[k], sample);
                    BackwardResult res = backward_with_reversal(out.nets[k], targets[k], batch,
                                                                spec);
                    adams[k].step(out.nets[k].params(), res.grad, lr);
                    buffers[k].update_priorities(sample.indices, res.td_errors);
                    td_acc += res.loss_td;
                    l2_acc += res.loss_l2;
                    tr_acc += res.loss_tr;
                    sup_acc += res.loss_sup;
                    ++loss_count;
                }
            }

            if (step % tc.schedule.target_sync_interval == 0) {
                targets = out.nets;
                if (method_uses_demos(method)) {
                    for (int k = 0; k < n_chasers; ++k) {
                        refresh_hidden_states(demo_data[k], out.nets[k]);
                        for (std::size_t i = 0; i < demo_data[k].items.size(); ++i) {
                            buffers[k].at_mut(i).h_prev = demo_data[k].items[i].h_prev;
                            buffers[k].at_mut(i).h_cur = demo_data[k].items[i].h_cur;
                        }
                    }
                }
            }

            if (tc.eval_interval > 0 && step % tc.eval_interval == 0) {
                RolloutOptions ropt;
                ropt.eps = tc.schedule.eps_test;
                ropt.n_episodes = tc.eval_episodes;
                ropt.condition = 0;
                ropt.seed = derive_seed(opt.seed, 0xEE000000ULL + static_cast<std::uint64_t>(step));
                ropt.demo_pool = demos.empty() ? nullptr : &demos;
                auto evals = rollout_nets(out.nets, world, ropt);
                int contacts = 0;
                for (const auto& e : evals)
                    if (e.outcome == TerminationCause::Contact) ++contacts;
                last_eval = static_cast<double>(contacts) / std::max(1, tc.eval_episodes);
            }

            if (step % log_interval == 0 && loss_count > 0) {
                log.row("online", step, 0, td_acc / loss_count, l2_acc / loss_count,
                        tr_acc / loss_count, sup_acc / loss_count, eps,
                        return_count > 0 ? return_avg / return_count : 0.0, last_eval);
                td_acc = l2_acc = tr_acc = sup_acc = 0;
                loss_count = 0;
            }
        }

        if (env.done()) {
            return_avg += episode_contact ? 1.0 : 0.0;
            ++return_count;
            if (return_count > 100) {
                return_avg *= 100.0 / return_count;
                return_count = 100;
            }
        }
        ++ep_counter;
    }

    out.env_steps = step;
    out.episodes_run = ep_counter;
    log.row("online", step, 0, 0.0, 0.0, 0.0, 0.0, tc.schedule.epsilon_at(step),
            return_count > 0 ? return_avg / return_count : 0.0, last_eval);
    return out;
}

}  // namespace animarl
