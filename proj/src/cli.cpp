// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#include "otloss/cli.hpp"

#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "otloss/error.hpp"
#include "otloss/gradcheck.hpp"
#include "otloss/io.hpp"
#include "otloss/recipe_metrics.hpp"
#include "otloss/sinkhorn.hpp"
#include "otloss/token_losses.hpp"
#include "otloss/toy_trainer.hpp"

namespace otloss::cli {
namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::InvalidConfig:
    case ErrorKind::UnknownComponent:
    case ErrorKind::MissingComponent:
      return kParse;
    case ErrorKind::SchemaError:
    case ErrorKind::UnparsableIngredient:
      return kSchema;
    case ErrorKind::InvalidShape:
    case ErrorKind::InvalidSpan:
    case ErrorKind::InvalidToken:
      return kShape;
    default:
      return kFailure;
  }
}

// Output goes to `path`, or to `out` when the path is empty or "-".
void emit(std::ostream& out, const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    io::write_file(path, text);
  }
}

struct ScoreArgs {
  std::string pairs;
  std::string out;
  std::string format = "csv";
  MetricThresholds thresholds{};
  std::string lexicon;
};

int cmd_score(const ScoreArgs& a, std::ostream& out) {
  const auto& th = a.thresholds;
  if (th.quantity_rel_tol < 0 || th.time_rel_tol < 0 || th.temperature_abs_tol < 0) {
    throw Error(ErrorKind::InvalidConfig, "tolerances must be non-negative");
  }
  std::optional<ActionLexicon> lexicon;
  std::string lexicon_path = a.lexicon;
  if (lexicon_path.empty()) {
    if (const char* env = std::getenv("OTLOSS_LEXICON"); env && *env) lexicon_path = env;
  }
  if (!lexicon_path.empty()) lexicon = ActionLexicon::from_file(lexicon_path);

  const auto pairs = io::recipe_pairs_from_json(io::load_json(a.pairs));
  if (pairs.empty()) throw Error(ErrorKind::SchemaError, "pairs file holds no records");

  MetricOptions opts{th, lexicon ? &*lexicon : nullptr};
  std::vector<std::string> ids;
  std::vector<MetricReport> rows;
  for (const auto& p : pairs) {
    ids.push_back(p.id);
    rows.push_back(score_pair(p.pred, p.gold, opts));
  }
  const MetricReport agg = aggregate(rows);
  emit(out, a.out,
       a.format == "json" ? io::report_json(ids, rows, agg) : io::report_csv(ids, rows, agg));
  return kOk;
}

struct LossArgs {
  std::string logits;
  std::string targets;
  std::string embeddings;
  std::string span;
  std::string target_span;
  std::string spec = R"({"ce": 1})";
  SinkhornConfig sinkhorn{};
  double gamma = 2.0;
  double smooth = 1e-6;
};

CompositeSpec load_spec(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    return io::composite_spec_from_json(io::parse_json(text, "--spec"));
  }
  return io::composite_spec_from_json(io::load_json(text));
}

int cmd_loss(const LossArgs& a, std::ostream& out) {
  const CompositeSpec spec = load_spec(a.spec);
  a.sinkhorn.validate();
  const Tensor logits = io::load_tensor(a.logits);
  const auto targets = io::token_ids_from_json(io::load_json(a.targets));
  if (targets.size() != logits.rows()) {
    throw Error(ErrorKind::InvalidShape, fmt::format("targets: expected {} ids (logits rows), got {}",
                                                     logits.rows(), targets.size()));
  }

  std::map<std::string, LossResult> parts;
  if (spec.weight("ce") > 0) parts.emplace("ce", cross_entropy(logits, targets));
  if (spec.weight("focal") > 0) parts.emplace("focal", focal(logits, targets, a.gamma));
  if (spec.weight("dice") > 0) parts.emplace("dice", dice(logits, targets, a.smooth));
  if (spec.weight("topo") > 0) {
    if (a.embeddings.empty() || a.span.empty()) {
      throw Error(ErrorKind::InvalidConfig, "topo needs --embeddings and --span");
    }
    const Tensor embeddings = io::load_tensor(a.embeddings);
    if (embeddings.rows() != logits.cols()) {
      throw Error(ErrorKind::InvalidShape,
                  fmt::format("embeddings: expected [{}, d], got [{}, {}]", logits.cols(),
                              embeddings.rows(), embeddings.cols()));
    }
    const SpanMask span = io::parse_span(a.span);
    const SpanMask target_span = a.target_span.empty() ? span : io::parse_span(a.target_span);
    parts.emplace("topo",
                  topological_loss(logits, targets, embeddings, span, target_span, a.sinkhorn));
  }
  const LossResult total = composite(spec, parts);

  io::Json j;
  j["value"] = total.value;
  j["components"] = io::Json::object();
  for (const auto& [name, part] : parts) j["components"][name] = part.value;
  j["grad_norm"] = frobenius_norm(total.grad);
  out << j.dump(2) << "\n";
  return kOk;
}

int cmd_gradcheck(const GradcheckOptions& opts, std::ostream& out, std::ostream& err) {
  const auto entries = run_gradcheck(opts);
  std::string failures;
  for (const auto& e : entries) {
    out << fmt::format("{:<6} max_rel_err={:.3e} threshold={:.0e} instances={} {}\n", e.loss,
                       e.max_rel_error, e.threshold, e.instances, e.passed() ? "PASS" : "FAIL");
    if (!e.passed()) failures += (failures.empty() ? "" : ", ") + e.loss;
  }
  if (!failures.empty()) {
    err << "gradcheck failed: " << failures << "\n";
    return kCheck;
  }
  return kOk;
}

struct TrainArgs {
  std::string config;
  std::string out;
  std::string model_out;
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon;
  std::optional<std::size_t> max_iters;
};

int cmd_train_toy(const TrainArgs& a, std::ostream& out) {
  io::ToyRunConfig cfg;
  if (!a.config.empty()) cfg = io::toy_config_from_json(io::load_json(a.config));
  if (a.seed) cfg.train.seed = *a.seed;
  if (a.epsilon) cfg.train.sinkhorn.epsilon = *a.epsilon;
  if (a.max_iters) cfg.train.sinkhorn.max_iters = *a.max_iters;
  cfg.train.sinkhorn.validate();

  const auto corpus = synth_corpus(cfg.train.seed, cfg.samples);
  auto model = ToyModel::init(cfg.dim, cfg.train.seed);
  const TrainResult result = train(std::move(model), corpus, cfg.train);
  emit(out, a.out, trajectory_csv(result.trajectory));
  if (!a.model_out.empty()) io::write_file(a.model_out, io::model_to_json(result.model).dump(2) + "\n");
  return kOk;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transport-based sequence losses and recipe metrics"};
  app.name("otloss");
  app.require_subcommand(1);

  ScoreArgs score;
  auto* sc = app.add_subcommand("score", "Score predicted recipes against gold recipes");
  sc->add_option("--pairs", score.pairs, "JSON array of {id, pred, gold}")->required();
  sc->add_option("--out", score.out, "Report path (stdout when omitted)");
  sc->add_option("--format", score.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sc->add_option("--qty-tol", score.thresholds.quantity_rel_tol, "Relative quantity tolerance");
  sc->add_option("--time-tol", score.thresholds.time_rel_tol, "Relative time tolerance");
  sc->add_option("--temp-tol", score.thresholds.temperature_abs_tol, "Absolute tolerance in C");
  sc->add_option("--action-lexicon", score.lexicon, "Verb list (default: $OTLOSS_LEXICON, built-in)");

  LossArgs loss;
  auto* lc = app.add_subcommand("loss", "Evaluate a composite loss on tensor files");
  lc->add_option("--logits", loss.logits, "Tensor JSON, T x V")->required();
  lc->add_option("--targets", loss.targets, "JSON array of T token ids")->required();
  lc->add_option("--embeddings", loss.embeddings, "Tensor JSON, V x d");
  lc->add_option("--span", loss.span, "Predicted span start:end");
  lc->add_option("--target-span", loss.target_span, "Target span (defaults to --span)");
  lc->add_option("--spec", loss.spec, "Weights as inline JSON or a path");
  lc->add_option("--epsilon", loss.sinkhorn.epsilon, "Sinkhorn regularization");
  lc->add_option("--max-iters", loss.sinkhorn.max_iters, "Sinkhorn iteration cap");
  lc->add_option("--tolerance", loss.sinkhorn.tolerance, "Sinkhorn marginal tolerance");
  lc->add_option("--gamma", loss.gamma, "Focal exponent");
  lc->add_option("--smooth", loss.smooth, "Dice smoothing");

  GradcheckOptions gc_opts;
  auto* gc = app.add_subcommand("gradcheck", "Compare analytic gradients with finite differences");
  gc->add_option("--seed", gc_opts.seed, "First instance seed");
  gc->add_option("--which", gc_opts.which, "ce, focal, dice, topo or all");
  gc->add_flag("--inject-fault", gc_opts.inject_fault)->group("");

  TrainArgs tr;
  auto* tc = app.add_subcommand("train-toy", "Train the toy decoder and write its trajectory");
  tc->add_option("--config", tr.config, "TrainConfig JSON");
  tc->add_option("--out", tr.out, "Trajectory CSV path (stdout when omitted)");
  tc->add_option("--model-out", tr.model_out, "Model JSON path");
  tc->add_option("--seed", tr.seed, "Override the config seed");
  tc->add_option("--epsilon", tr.epsilon, "Override the Sinkhorn epsilon");
  tc->add_option("--max-iters", tr.max_iters, "Override the Sinkhorn iteration cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParse;
  }

  try {
    if (sc->parsed()) return cmd_score(score, out);
    if (lc->parsed()) return cmd_loss(loss, out);
    if (gc->parsed()) return cmd_gradcheck(gc_opts, out, err);
    return cmd_train_toy(tr, out);
  } catch (const Error& e) {
    err << "otloss: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "otloss: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace otloss::cli
