/*
 * Copyright 2026 The zsynth Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "zsynth/synth.hpp"

#include "zsynth/games.hpp"
#include "zsynth/lift.hpp"
#include "zsynth/transforms.hpp"
#include "zsynth/verify.hpp"

namespace zsynth {

bool PipelineTrace::bounds_hold() const {
    for (const auto& p : passes)
        if (p.pass == "reduce" && p.reduced_q_states > p.size_bound) return false;
    return true;
}

Controller disjoint_union(const Plant& plant, const std::vector<std::vector<int>>& parts,
                          const std::vector<Controller>& controllers) {
    const auto& alpha = plant.alphabet();
    Controller out;
    out.automaton = Automaton(alpha);
    out.pi.resize(alpha.num_processes());
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const auto& keep = parts[k];
        const auto& c = controllers[k];
        std::vector<int> newp(alpha.num_processes(), kNone);
        for (std::size_t i = 0; i < keep.size(); ++i) newp[keep[i]] = static_cast<int>(i);
        for (std::size_t i = 0; i < keep.size(); ++i) {
            out.automaton.states[keep[i]] = c.automaton.states[i];
            out.automaton.initial[keep[i]] = c.automaton.initial[i];
            out.pi[keep[i]] = c.pi[i];
        }
        int local = 0;
        for (int act = 0; act < alpha.num_actions(); ++act) {
            bool inside = true;
            for (int p : alpha.dom(act)) inside &= newp[p] != kNone;
            if (!inside) continue;
            for (const auto& [f, t] : c.automaton.delta(local)) out.automaton.add_transition(act, f, t);
            ++local;
        }
    }
    return out;
}

namespace {

std::vector<std::string> names_of(const Alphabet& alpha) { return alpha.processes; }

class Pipeline {
public:
    Pipeline(const SynthOptions& opts, PipelineTrace* trace) : opts_(opts), trace_(trace) {}

    std::optional<Controller> solve(const Plant& plant, int depth) {
        const auto& alpha = plant.alphabet();
        auto graph = communication_graph(alpha);
        if (!is_acyclic(graph)) throw InputError("communication graph is not acyclic");

        if (has_controllable_communication(alpha)) {
            auto loc = localize_controllable(plant);
            record(depth, "localize", plant, loc.plant);
            auto sub = solve(loc.plant, depth + 1);
            if (!sub) return std::nullopt;
            return lift_localize(loc, *sub, plant);
        }

        if (alpha.num_processes() == 1) {
            auto game = control_game(plant);
            record(depth, "game", plant, plant);
            auto proposal = solve_control_game(game);
            if (!proposal) return std::nullopt;
            return controller_from_proposal(plant, *proposal);
        }

        auto parts = connected_components(graph);
        if (parts.size() > 1) {
            record(depth, "split", plant, plant);
            std::vector<Controller> subs;
            for (const auto& keep : parts) {
                auto sub = solve(restrict_to(plant, keep), depth + 1);
                if (!sub) return std::nullopt;
                subs.push_back(std::move(*sub));
            }
            return disjoint_union(plant, parts, subs);
        }

        const auto step = root_and_order(graph).front().order.front();
        const int r = step.leaf, q = step.parent;
        const std::string rn = alpha.processes[r], qn = alpha.processes[q];

        auto aware = make_r_aware(plant, r);
        record(depth, "aware", plant, aware.plant, rn, qn);
        auto sh = shorten(aware.plant, r, opts_.max_states);
        record(depth, "shorten", aware.plant, sh.plant, rn, qn).short_bound = r_short_bound(sh.plant.automaton, r);
        auto red = reduce(sh.plant, q, r, opts_.max_states);
        auto& rec = record(depth, "reduce", sh.plant, red.plant, rn, qn);
        rec.strategies = red.strategies.size();
        rec.reduced_q_states = red.plant.automaton.num_states(red.qr);
        rec.size_bound = reduce_size_bound(red);
        auto comp = compile_red_condition(red, opts_.max_states);
        record(depth, "compile", red.plant, comp.plant, rn, qn);

        auto sub = solve(comp.plant, depth + 1);
        if (!sub) return std::nullopt;
        Controller rd = coarsen(*sub, red.plant.automaton, red.qr, comp.base);
        Controller lifted = lift_red(red, rd).controller;
        Controller aware_c = lift_short(sh, aware.plant, lifted);
        return coarsen(aware_c, plant.automaton, r, aware.base);
    }

private:
    PassRecord& record(int depth, const char* pass, const Plant& in, const Plant& out, const std::string& leaf = {},
                       const std::string& parent = {}) {
        if (!trace_) return scratch_;
        PassRecord rec;
        rec.depth = depth;
        rec.pass = pass;
        rec.processes = names_of(in.alphabet());
        rec.leaf = leaf;
        rec.parent = parent;
        rec.states_in = in.automaton.total_local_states();
        rec.states_out = out.automaton.total_local_states();
        trace_->passes.push_back(std::move(rec));
        return trace_->passes.back();
    }

    SynthOptions opts_;
    PipelineTrace* trace_;
    PassRecord scratch_;
};

std::optional<Controller> run_checked(const Plant& plant, const SynthOptions& opts, PipelineTrace* trace) {
    require_valid(plant);
    Pipeline pipe(opts, trace);
    auto c = pipe.solve(plant, 0);
    if (!c) return std::nullopt;
    auto v = verify(plant, *c, opts.max_states);
    if (!v.correct()) throw StructuralError("synthesized controller fails verification:\n" + explain(plant, *c, v));
    return c;
}

}  // namespace

std::optional<Controller> synthesize(const Plant& plant, const SynthOptions& opts) {
    return run_checked(plant, opts, nullptr);
}

PipelineTrace pipeline_trace(const Plant& plant, const SynthOptions& opts) {
    PipelineTrace t;
    t.realizable = run_checked(plant, opts, &t).has_value();
    return t;
}

json trace_report_to_json(const PipelineTrace& t) {
    json passes = json::array();
    for (const auto& p : t.passes) {
        json j = {{"depth", p.depth},
                  {"pass", p.pass},
                  {"processes", p.processes},
                  {"states_in", p.states_in},
                  {"states_out", p.states_out}};
        if (!p.leaf.empty()) {
            j["leaf"] = p.leaf;
            j["parent"] = p.parent;
        }
        if (p.pass == "shorten") j["short_bound"] = p.short_bound ? json(*p.short_bound) : json(nullptr);
        if (p.pass == "reduce") {
            j["strategies"] = p.strategies;
            j["reduced_q_states"] = p.reduced_q_states;
            j["size_bound"] = p.size_bound;
            j["within_bound"] = p.reduced_q_states <= p.size_bound;
        }
        passes.push_back(std::move(j));
    }
    return {{"kind", "pipeline_trace"}, {"realizable", t.realizable}, {"bounds_hold", t.bounds_hold()}, {"passes", passes}};
}

}  // namespace zsynth
