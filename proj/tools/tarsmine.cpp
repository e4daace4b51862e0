// tarsmine: mine recurring temporal patterns from transaction logs and
// predict next baskets with them.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tars/baselines.hpp"
#include "tars/evaluation.hpp"
#include "tars/io.hpp"
#include "tars/parallel.hpp"
#include "tars/predictor.hpp"
#include "tars/synth.hpp"

namespace fs = std::filesystem;
using namespace tars;

namespace {

std::string sanitize(const std::string& id) {
    std::string out;
    for (char c : id) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')
            out.push_back(c);
        else {
            char buf[8];
            std::snprintf(buf, sizeof buf, "%%%02X", static_cast<unsigned char>(c));
            out += buf;
        }
    }
    return out.empty() ? "_" : out;
}

ParameterTriple parse_triple(const std::string& text) {
    std::istringstream is(text);
    ParameterTriple t;
    char c1 = 0, c2 = 0;
    if (!(is >> t.delta_max >> c1 >> t.q_min >> c2 >> t.p_min) || c1 != ',' || c2 != ',')
        throw CLI::ValidationError("--fixed expects delta_max,q_min,p_min");
    return t;
}

struct KSpec {
    bool personal = false;
    std::size_t lo = 0, hi = 0;  // inclusive sweeps; lo == hi for a single k
};

KSpec parse_k(const std::string& text) {
    KSpec k;
    if (text == "personal") {
        k.personal = true;
        return k;
    }
    const auto dots = text.find("..");
    auto to_num = [&](const std::string& s) {
        std::size_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size() || v < 1)
            throw CLI::ValidationError("--k expects 'personal', N or A..B");
        return v;
    };
    if (dots == std::string::npos) {
        k.lo = k.hi = to_num(text);
    } else {
        k.lo = to_num(text.substr(0, dots));
        k.hi = to_num(text.substr(dots + 2));
        if (k.hi < k.lo) throw CLI::ValidationError("--k range must be ascending");
    }
    return k;
}

Dataset load_input(const std::string& path, std::size_t min_baskets) {
    Dataset ds = load_transactions(path);
    if (min_baskets > 1) ds = filter_min_baskets(ds, min_baskets);
    return ds;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write " + path.string());
    f << text;
}

nlohmann::json trace_json(const EstimationTrace& trace) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : trace.rows) {
        nlohmann::json j;
        j["head"] = r.seq.head;
        j["tail"] = r.seq.tail;
        j["delta_hat"] = r.delta_hat;
        j["q_hat"] = r.q_hat;
        j["w"] = r.w;
        j["e"] = r.e;
        j["rec"] = r.rec;
        j["clusters"] = {{"delta", r.cluster_delta}, {"q", r.cluster_q}, {"p", r.cluster_p}};
        j["triple"] = {{"delta_max", r.triple.delta_max},
                       {"q_min", r.triple.q_min},
                       {"p_min", r.triple.p_min}};
        rows.push_back(std::move(j));
    }
    return rows;
}

// --- mine ---

struct MineArgs {
    std::string input;
    std::string out_dir;
    std::string fixed;
    std::size_t max_len = 4;
    std::size_t jobs = 1;
    std::size_t min_baskets = 1;
    bool trace = false;
};

void run_mine(const MineArgs& args) {
    Dataset ds = load_input(args.input, args.min_baskets);
    fs::create_directories(args.out_dir);

    MiningOptions opt;
    opt.max_length = args.max_len;
    if (!args.fixed.empty()) opt.fixed = parse_triple(args.fixed);

    std::vector<const PurchaseHistory*> histories;
    for (const auto& [id, h] : ds.histories) histories.push_back(&h);

    auto results = parallel_map<std::pair<TarsSet, EstimationTrace>>(
        histories.size(), args.jobs, [&](std::size_t i) {
            EstimationTrace trace;
            TarsSet set = extract_tars(*histories[i], opt, args.trace ? &trace : nullptr);
            return std::make_pair(std::move(set), std::move(trace));
        });

    std::size_t total = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& [set, trace] = results[i];
        std::ofstream f(fs::path(args.out_dir) / (sanitize(set.customer) + ".jsonl"));
        if (!f) throw DataError("cannot write model for customer " + set.customer);
        write_tars_jsonl(set, f);
        if (args.trace) {
            std::ofstream tf(fs::path(args.out_dir) / (sanitize(set.customer) + ".trace.json"));
            tf << trace_json(trace).dump(2) << '\n';
        }
        total += set.tars.size();
    }

    nlohmann::json meta;
    meta["command"] = "mine";
    meta["input"] = args.input;
    meta["customers"] = histories.size();
    meta["patterns"] = total;
    meta["max_len"] = args.max_len;
    meta["fixed"] = args.fixed.empty() ? "estimated" : args.fixed;
    meta["min_baskets"] = args.min_baskets;
    write_text(fs::path(args.out_dir) / "mine.json", meta.dump(2) + "\n");
    std::cout << "mined " << total << " patterns for " << histories.size() << " customers into "
              << args.out_dir << "\n";
}

// --- predict ---

struct PredictArgs {
    std::string input;
    std::string model_dir;
    std::string out_path;
    std::string k = "personal";
    std::string method = "tbp";
    std::size_t jobs = 1;
    std::size_t min_baskets = 1;
    bool mine_on_the_fly = false;
    std::size_t max_len = 4;
};

TarsSet load_model(const std::string& dir, const PurchaseHistory& h, bool mine_fallback,
                   std::size_t max_len) {
    const fs::path path = fs::path(dir) / (sanitize(h.customer) + ".jsonl");
    if (fs::exists(path)) {
        std::ifstream f(path);
        return read_tars_jsonl(f, h.customer);
    }
    if (!mine_fallback)
        throw DataError("no model for customer " + h.customer + " under " + dir +
                        " (use --mine-on-the-fly)");
    MiningOptions opt;
    opt.max_length = max_len;
    return extract_tars(h, opt);
}

void run_predict(const PredictArgs& args) {
    Dataset ds = load_input(args.input, args.min_baskets);
    const auto method = method_from_name(args.method);
    if (!method) throw CLI::ValidationError("--method must be tbp, top, lst or mc");
    const KSpec k = parse_k(args.k);
    if (!k.personal && k.lo != k.hi)
        throw CLI::ValidationError("predict takes a single k, not a range");

    std::vector<const PurchaseHistory*> histories;
    for (const auto& [id, h] : ds.histories) histories.push_back(&h);

    auto lines = parallel_map<std::string>(histories.size(), args.jobs, [&](std::size_t i) {
        const PurchaseHistory& h = *histories[i];
        const std::size_t kk = k.personal ? personalized_k(h) : k.lo;
        std::vector<ItemId> items;
        std::map<ItemId, double> score_of;
        std::size_t active_count = 0;
        switch (*method) {
            case Method::Tbp: {
                TarsSet model = load_model(args.model_dir, h, args.mine_on_the_fly, args.max_len);
                ActiveTars active = get_active_tars(h, model);
                active_count = active.active.size();
                ScoreTable scores = calculate_item_scores(h, active);
                items = rank_items(h, scores, kk);
                for (const auto& [id, s] : scores) score_of[id] = s;
                break;
            }
            case Method::Top: {
                items = predict_top(h, kk);
                for (ItemId id : items) score_of[id] = static_cast<double>(h.item_support(id));
                break;
            }
            case Method::Lst: {
                items = predict_lst(h, kk);
                for (ItemId id : items) score_of[id] = static_cast<double>(h.item_support(id));
                break;
            }
            case Method::Mc: {
                if (h.size() < 2)
                    throw DataError("customer " + h.customer + ": mc needs at least 2 baskets");
                items = predict_mc(h, kk);
                auto scores = mc_scores(h);
                for (ItemId id : items) score_of[id] = scores.count(id) ? scores[id] : 0.0;
                break;
            }
        }
        nlohmann::ordered_json j;
        j["customer"] = h.customer;
        j["k"] = kk;
        j["items"] = items;
        std::vector<double> scores;
        for (ItemId id : items) scores.push_back(score_of.count(id) ? score_of[id] : 0.0);
        j["scores"] = scores;
        j["active_tars"] = active_count;
        j["method"] = args.method;
        return j.dump() + "\n";
    });

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!args.out_path.empty()) {
        file.open(args.out_path);
        if (!file) throw DataError("cannot write " + args.out_path);
        out = &file;
    }
    for (const auto& line : lines) *out << line;
}

// --- evaluate ---

struct EvaluateArgs {
    std::string input;
    std::string protocol = "loo";
    std::string method = "tbp";
    std::string k = "personal";
    std::string out_dir = ".";
    std::string fixed;
    double fraction = 0.7;
    std::size_t horizon = 20;
    std::size_t max_len = 4;
    std::size_t jobs = 1;
    std::size_t min_baskets = 1;
    std::uint64_t seed = 0;
};

nlohmann::json evaluate_meta(const EvaluateArgs& args) {
    nlohmann::json meta;
    meta["command"] = "evaluate";
    meta["input"] = args.input;
    meta["protocol"] = args.protocol;
    meta["method"] = args.method;
    meta["k"] = args.k;
    meta["fraction"] = args.fraction;
    meta["horizon"] = args.horizon;
    meta["max_len"] = args.max_len;
    meta["min_baskets"] = args.min_baskets;
    meta["fixed"] = args.fixed.empty() ? "estimated" : args.fixed;
    meta["seed"] = args.seed;
    return meta;
}

void run_evaluate(const EvaluateArgs& args) {
    Dataset ds = load_input(args.input, args.min_baskets);
    const auto method = method_from_name(args.method);
    if (!method) throw CLI::ValidationError("--method must be tbp, top, lst or mc");
    const KSpec k = parse_k(args.k);
    fs::create_directories(args.out_dir);
    const fs::path out_dir(args.out_dir);

    EvalOptions opt;
    opt.method = *method;
    opt.jobs = args.jobs;
    opt.mining.max_length = args.max_len;
    if (!args.fixed.empty()) opt.mining.fixed = parse_triple(args.fixed);
    opt.k_policy = k.personal ? KPolicy::personalized() : KPolicy::fixed(k.lo);

    nlohmann::json meta = evaluate_meta(args);

    if (args.protocol == "loo") {
        if (!k.personal && k.lo != k.hi) {
            std::ostringstream series, rows;
            series << "k,customers,mean_f1,hit_ratio,normalized_f1\n";
            rows << "k,customer,train_baskets,predicted,hit,precision,recall,f1,tars,active_tars\n";
            for (std::size_t kk = k.lo; kk <= k.hi; ++kk) {
                opt.k_policy = KPolicy::fixed(kk);
                auto report = evaluate_leave_one_out(ds, opt);
                char buf[160];
                std::snprintf(buf, sizeof buf, "%zu,%zu,%.6f,%.6f,%.6f\n", kk, report.evaluated,
                              report.mean_f1, report.hit_ratio, report.normalized_f1);
                series << buf;
                for (const auto& r : report.rows) {
                    std::snprintf(buf, sizeof buf, "%zu,%s,%zu,%zu,%d,%.6f,%.6f,%.6f,%zu,%zu\n",
                                  kk, r.customer.c_str(), r.train_baskets, r.predicted, r.hit,
                                  r.precision, r.recall, r.f1, r.tars_count, r.active_tars);
                    rows << buf;
                }
            }
            write_text(out_dir / "series.csv", series.str());
            write_text(out_dir / "rows.csv", rows.str());
            write_text(out_dir / "summary.json", meta.dump(2) + "\n");
            std::cout << "wrote " << (out_dir / "series.csv").string() << "\n";
            return;
        }
        auto report = evaluate_leave_one_out(ds, opt);
        std::ostringstream rows;
        write_report_csv(report, rows);
        write_text(out_dir / "rows.csv", rows.str());
        std::ostringstream summary;
        write_report_json(report, summary);
        nlohmann::json j = nlohmann::json::parse(summary.str());
        j["config"] = meta;
        write_text(out_dir / "summary.json", j.dump(2) + "\n");
        std::cout << "loo " << args.method << ": mean_f1=" << report.mean_f1
                  << " hit_ratio=" << report.hit_ratio << " norm_f1=" << report.normalized_f1
                  << " (" << report.evaluated << " customers, " << report.skipped << " skipped)\n";
    } else if (args.protocol == "multistep") {
        auto steps = evaluate_multi_step(ds, opt, args.fraction, args.horizon);
        std::ostringstream os;
        write_step_series_csv(steps, os);
        write_text(out_dir / "steps.csv", os.str());
        write_text(out_dir / "summary.json", meta.dump(2) + "\n");
        std::cout << "wrote " << (out_dir / "steps.csv").string() << "\n";
    } else if (args.protocol == "weeks") {
        auto weeks = evaluate_incremental_weeks(ds, opt);
        std::ostringstream os;
        write_week_series_csv(weeks, os);
        write_text(out_dir / "weeks.csv", os.str());
        write_text(out_dir / "summary.json", meta.dump(2) + "\n");
        std::cout << "wrote " << (out_dir / "weeks.csv").string() << "\n";
    } else if (args.protocol == "paramfixed") {
        ParameterTriple fixed{14.0, 3.0, 2.0};
        if (!args.fixed.empty()) fixed = parse_triple(args.fixed);
        auto cmp = evaluate_parameter_fixed(ds, opt, fixed);
        std::ostringstream rows_free, rows_fixed;
        write_report_csv(cmp.parameter_free, rows_free);
        write_report_csv(cmp.parameter_fixed, rows_fixed);
        write_text(out_dir / "rows_free.csv", rows_free.str());
        write_text(out_dir / "rows_fixed.csv", rows_fixed.str());
        std::ostringstream counts;
        counts << "customer,tars_free,tars_fixed\n";
        for (std::size_t i = 0; i < cmp.parameter_free.rows.size(); ++i)
            counts << cmp.parameter_free.rows[i].customer << ',' << cmp.tars_counts_free[i] << ','
                   << cmp.tars_counts_fixed[i] << '\n';
        write_text(out_dir / "tars_counts.csv", counts.str());
        nlohmann::json j;
        j["config"] = meta;
        j["parameter_free"] = {{"mean_f1", cmp.parameter_free.mean_f1},
                               {"hit_ratio", cmp.parameter_free.hit_ratio}};
        j["parameter_fixed"] = {{"mean_f1", cmp.parameter_fixed.mean_f1},
                                {"hit_ratio", cmp.parameter_fixed.hit_ratio}};
        write_text(out_dir / "summary.json", j.dump(2) + "\n");
        std::cout << "paramfree mean_f1=" << cmp.parameter_free.mean_f1
                  << " paramfixed mean_f1=" << cmp.parameter_fixed.mean_f1 << "\n";
    } else {
        throw CLI::ValidationError("--protocol must be loo, multistep, weeks or paramfixed");
    }
}

// --- synth ---

struct SynthArgs {
    std::string config_path;
    std::string out_path = "synthetic.csv";
    std::string format = "csv";
    std::uint64_t seed = 0;
    std::size_t customers = 0;
    bool have_seed = false;
    bool have_customers = false;
};

void run_synth(const SynthArgs& args) {
    std::ifstream f(args.config_path);
    if (!f) throw DataError("cannot open config " + args.config_path);
    std::stringstream buf;
    buf << f.rdbuf();
    SyntheticConfig cfg = SyntheticConfig::from_json_text(buf.str());
    if (args.have_seed) cfg.seed = args.seed;
    if (args.have_customers) cfg.customers = args.customers;

    Dataset ds = generate_synthetic(cfg);
    const auto format =
        args.format == "jsonl" ? TransactionFormat::JsonLines : TransactionFormat::Csv;
    save_transactions(ds, args.out_path, format);
    // the effective configuration ships next to the data for reproducibility
    write_text(args.out_path + ".meta.json", cfg.to_json_text() + "\n");
    std::size_t baskets = 0;
    for (const auto& [id, h] : ds.histories) baskets += h.size();
    std::cout << "wrote " << ds.customer_count() << " customers, " << baskets << " baskets to "
              << args.out_path << "\n";
}

// --- inspect ---

struct InspectArgs {
    std::string model_dir;
    std::size_t top = 10;
    bool trace = false;
};

void run_inspect(const InspectArgs& args) {
    struct Agg {
        std::size_t coverage = 0;
        std::vector<double> a1, a2, p, q;
    };
    std::map<Sequence, Agg> by_seq;
    std::size_t customers = 0;
    if (fs::exists(args.model_dir)) {
        for (const auto& entry : fs::directory_iterator(args.model_dir)) {
            if (entry.path().extension() != ".jsonl") continue;
            std::ifstream f(entry.path());
            TarsSet set = read_tars_jsonl(f, entry.path().stem().string());
            ++customers;
            for (const Tars& t : set.tars) {
                Agg& a = by_seq[t.seq];
                ++a.coverage;
                a.a1.push_back(t.alpha1);
                a.a2.push_back(t.alpha2);
                a.p.push_back(static_cast<double>(t.p));
                a.q.push_back(t.q);
            }
        }
    }
    if (by_seq.empty()) {
        std::cout << "no patterns\n";
        return;
    }
    std::vector<std::pair<Sequence, const Agg*>> order;
    for (const auto& [seq, agg] : by_seq) order.emplace_back(seq, &agg);
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.second->coverage != b.second->coverage)
            return a.second->coverage > b.second->coverage;
        return a.first < b.first;
    });
    std::cout << customers << " customers, " << by_seq.size() << " distinct sequences\n";
    auto itemset = [](const std::vector<ItemId>& v) {
        std::string s = "{";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(v[i]);
        }
        return s + "}";
    };
    for (std::size_t i = 0; i < std::min(args.top, order.size()); ++i) {
        const auto& [seq, agg] = order[i];
        // medians across the customers carrying the sequence
        std::printf("%5zu/%zu  %s --(%g,%g)-->[p=%.2f,q=%.2f] %s\n", agg->coverage, customers,
                    itemset(seq.head).c_str(), median(agg->a1), median(agg->a2), median(agg->p),
                    median(agg->q), itemset(seq.tail).c_str());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"temporal recurring-sequence mining and next-basket prediction"};
    app.require_subcommand(1);
    std::function<void()> action;

    MineArgs mine_args;
    auto* mine = app.add_subcommand("mine", "extract patterns per customer");
    mine->add_option("--in", mine_args.input, "transaction csv/jsonl")->required();
    mine->add_option("--out", mine_args.out_dir, "output directory")->required();
    mine->add_option("--fixed", mine_args.fixed, "constant delta_max,q_min,p_min");
    mine->add_option("--max-len", mine_args.max_len, "sequence length cap")->check(CLI::Range(2, 8));
    mine->add_option("--jobs", mine_args.jobs, "worker threads")->check(CLI::PositiveNumber);
    mine->add_option("--min-baskets", mine_args.min_baskets, "drop shorter customers");
    mine->add_flag("--trace", mine_args.trace, "dump estimation traces");
    mine->callback([&] { action = [&] { run_mine(mine_args); }; });

    PredictArgs predict_args;
    auto* predict = app.add_subcommand("predict", "predict the next basket per customer");
    predict->add_option("--in", predict_args.input, "transaction csv/jsonl")->required();
    predict->add_option("--model", predict_args.model_dir, "mined model directory");
    predict->add_option("--out", predict_args.out_path, "output jsonl (default stdout)");
    predict->add_option("--k", predict_args.k, "basket size: N or 'personal'");
    predict->add_option("--method", predict_args.method, "tbp|top|lst|mc");
    predict->add_option("--jobs", predict_args.jobs, "worker threads")->check(CLI::PositiveNumber);
    predict->add_option("--min-baskets", predict_args.min_baskets, "drop shorter customers");
    predict->add_option("--max-len", predict_args.max_len, "sequence length cap");
    predict->add_flag("--mine-on-the-fly", predict_args.mine_on_the_fly,
                      "mine models for customers without a file");
    predict->callback([&] { action = [&] { run_predict(predict_args); }; });

    EvaluateArgs eval_args;
    auto* evaluate = app.add_subcommand("evaluate", "run an evaluation protocol");
    evaluate->add_option("--in", eval_args.input, "transaction csv/jsonl")->required();
    evaluate->add_option("--protocol", eval_args.protocol, "loo|multistep|weeks|paramfixed");
    evaluate->add_option("--method", eval_args.method, "tbp|top|lst|mc");
    evaluate->add_option("--k", eval_args.k, "'personal', N or A..B");
    evaluate->add_option("--out", eval_args.out_dir, "report directory");
    evaluate->add_option("--fixed", eval_args.fixed, "constant delta_max,q_min,p_min");
    evaluate->add_option("--fraction", eval_args.fraction, "multistep training fraction");
    evaluate->add_option("--horizon", eval_args.horizon, "multistep prediction count");
    evaluate->add_option("--max-len", eval_args.max_len, "sequence length cap");
    evaluate->add_option("--jobs", eval_args.jobs, "worker threads")->check(CLI::PositiveNumber);
    evaluate->add_option("--min-baskets", eval_args.min_baskets, "drop shorter customers");
    evaluate->add_option("--seed", eval_args.seed, "echoed into the report metadata");
    evaluate->callback([&] { action = [&] { run_evaluate(eval_args); }; });

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    synth->add_option("--config", synth_args.config_path, "json config")->required();
    synth->add_option("--out", synth_args.out_path, "output path");
    synth->add_option("--format", synth_args.format, "csv|jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    synth->add_option("--seed", synth_args.seed, "override the config seed")
        ->each([&](const std::string&) { synth_args.have_seed = true; });
    synth->add_option("--customers", synth_args.customers, "override the customer count")
        ->each([&](const std::string&) { synth_args.have_customers = true; });
    synth->callback([&] { action = [&] { run_synth(synth_args); }; });

    InspectArgs inspect_args;
    auto* inspect = app.add_subcommand("inspect", "summarize mined models");
    inspect->add_option("--model", inspect_args.model_dir, "mined model directory")->required();
    inspect->add_option("--top", inspect_args.top, "sequences to print");
    inspect->callback([&] { action = [&] { run_inspect(inspect_args); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    try {
        action();
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
