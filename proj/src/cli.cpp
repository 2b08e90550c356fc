#include "scriptgap/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "scriptgap/corpus_io.hpp"
#include "scriptgap/error.hpp"
#include "scriptgap/hashing.hpp"
#include "scriptgap/metrics.hpp"
#include "scriptgap/mixer.hpp"
#include "scriptgap/retrieval.hpp"
#include "scriptgap/romanizer.hpp"
#include "scriptgap/synthetic.hpp"
#include "scriptgap/toy_encoder.hpp"

namespace scriptgap::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Reproducibility record written next to a subcommand's outputs.
class Manifest {
 public:
  Manifest(std::string subcommand, std::vector<std::string> argv)
      : subcommand_(std::move(subcommand)), argv_(std::move(argv)) {}

  void input(const std::string& path, std::string_view bytes) {
    inputs_.push_back({{"path", path}, {"bytes", bytes.size()}, {"fnv1a64", hex64(fnv1a64(bytes))}});
  }
  void output(const std::string& path) { outputs_.push_back(path); }
  void seed(const std::string& name, std::uint64_t value) { seeds_[name] = value; }
  void tables(const Romanizer& r) {
    for (const auto& [script, table] : r.tables())
      tables_.push_back({{"script", std::string(script_name(script))}, {"version", table.version()}});
  }

  std::string dump() const {
    json j;
    j["toolkit_version"] = SCRIPTGAP_VERSION;
    j["subcommand"] = subcommand_;
    j["argv"] = argv_;
    j["inputs"] = inputs_;
    j["seeds"] = seeds_;
    j["tables"] = tables_;
    j["outputs"] = outputs_;
    return j.dump(2) + "\n";
  }

 private:
  std::string subcommand_;
  std::vector<std::string> argv_;
  json inputs_ = json::array();
  json seeds_ = json::object();
  json tables_ = json::array();
  std::vector<std::string> outputs_;
};

struct Context {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
  Manifest manifest;

  std::string read(const std::string& path) {
    std::string bytes;
    if (path == "-") {
      std::ostringstream ss;
      ss << in.rdbuf();
      bytes = ss.str();
    } else {
      bytes = read_file(path);
    }
    manifest.input(path, bytes);
    return bytes;
  }

  // Empty path or "-" means the output stream.
  void write(const std::string& path, std::string_view bytes) {
    if (path.empty() || path == "-") {
      out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      return;
    }
    write_file(path, bytes);
    manifest.output(path);
  }
};

Romanizer load_tables(Context& ctx, const std::vector<std::string>& paths) {
  Romanizer r;
  if (!paths.empty()) {
    for (const auto& p : paths) {
      auto bytes = ctx.read(p);
      try {
        r.add(load_rule_table(bytes));
      } catch (const ParseError& e) {
        throw ParseError(e.line(), p + ": " + e.what());
      }
    }
  } else {
    const char* env = std::getenv("SCRIPTGAP_TABLES");
    std::string dir = env && *env ? env : SCRIPTGAP_DEFAULT_TABLE_DIR;
    r = load_table_directory(dir);
  }
  ctx.manifest.tables(r);
  return r;
}

void print_warnings(Context& ctx, const std::vector<std::string>& warnings, std::size_t limit = 20) {
  for (std::size_t i = 0; i < warnings.size() && i < limit; ++i) ctx.err << "warning: " << warnings[i] << "\n";
  if (warnings.size() > limit) ctx.err << "warning: ... " << warnings.size() - limit << " more\n";
}

Run load_run(Context& ctx, const std::string& path, bool strict) {
  auto result = read_run_checked(ctx.read(path), {strict});
  print_warnings(ctx, result.warnings);
  return result.run;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cross-script retrieval toolkit: romanization, BM25, evaluation and transliterate-train", "scriptgap"};
  app.require_subcommand(1, 1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_version_flag("--version", SCRIPTGAP_VERSION);

  // Flags shared by name and meaning across subcommands.
  std::vector<std::string> tables;
  std::uint64_t seed = 0;
  std::vector<std::string> metrics;
  std::size_t k = 0;
  std::string config = "N";
  std::size_t m = 1;
  std::string manifest_path;
  unsigned threads = 1;

  auto add_common = [&](CLI::App* sub) { sub->add_option("--manifest", manifest_path, "Write a reproducibility manifest"); };
  auto add_tables = [&](CLI::App* sub) {
    sub->add_option("--table", tables, "Rule table file (repeatable; default: $SCRIPTGAP_TABLES or bundled tables)");
  };
  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 256u));
  };

  // romanize
  std::string input = "-", output;
  bool queries_mode = false;
  std::string han_separator;
  auto* romanize = app.add_subcommand("romanize", "Romanize text line by line");
  add_tables(romanize);
  add_common(romanize);
  romanize->add_option("--input", input, "Input file ('-' for stdin)");
  romanize->add_option("--output", output, "Output file (default stdout)");
  romanize->add_flag("--queries", queries_mode, "Input is qid<TAB>text; only the text is romanized");
  romanize->add_option("--han-separator", han_separator, "Separator between Han syllables");

  // index
  std::string collection, tokenizer_spec = "word", index_path;
  double k1 = 0.9, b = 0.4;
  auto* index = app.add_subcommand("index", "Build a BM25 index over a docno<TAB>text collection");
  add_common(index);
  index->add_option("--collection", collection, "Collection file")->required();
  index->add_option("--tokenizer", tokenizer_spec, "word | han_char | char_ngram:<n>");
  index->add_option("--k1", k1, "Default BM25 k1 stored in the index");
  index->add_option("--b", b, "Default BM25 b stored in the index");
  index->add_option("--output", index_path, "Index file")->required();

  // search
  std::string queries_path, tag = "scriptgap";
  std::optional<double> search_k1, search_b;
  auto* search_cmd = app.add_subcommand("search", "Run BM25 retrieval for a query file, emitting a TREC run");
  add_common(search_cmd);
  add_threads(search_cmd);
  search_cmd->add_option("--index", index_path, "Index file")->required();
  search_cmd->add_option("--queries", queries_path, "Query file (qid<TAB>text)")->required();
  search_cmd->add_option("--k", k, "Depth (default 1000)");
  search_cmd->add_option("--k1", search_k1, "BM25 k1 (default: index setting)");
  search_cmd->add_option("--b", search_b, "BM25 b (default: index setting)");
  search_cmd->add_option("--tag", tag, "Run tag");
  search_cmd->add_option("--output", output, "Run file (default stdout)");

  // evaluate
  std::string run_path, qrels_path;
  int rel_threshold = 1;
  bool strict = false;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Per-query and mean effectiveness of a run");
  add_common(evaluate_cmd);
  evaluate_cmd->add_option("--run", run_path, "Run file")->required();
  evaluate_cmd->add_option("--qrels", qrels_path, "Qrels file")->required();
  evaluate_cmd->add_option("--metric", metrics, "mrr@10, recall@1000, ndcg@20, ndcg_exp@20 (repeatable)");
  evaluate_cmd->add_option("--rel-threshold", rel_threshold, "Minimum grade counted as relevant")->check(CLI::PositiveNumber);
  evaluate_cmd->add_flag("--strict", strict, "Treat rank gaps and score inversions as errors");
  evaluate_cmd->add_option("--output", output, "Key-value output file (default stdout)");

  // gap-report
  std::string native_path, translit_path;
  auto* gap = app.add_subcommand("gap-report", "Native vs transliterated effectiveness with a paired test");
  add_common(gap);
  gap->add_option("--native", native_path, "Run for native-script queries")->required();
  gap->add_option("--translit", translit_path, "Run for transliterated queries")->required();
  gap->add_option("--qrels", qrels_path, "Qrels file")->required();
  gap->add_option("--metric", metrics, "Metric (default mrr@10)");
  gap->add_option("--rel-threshold", rel_threshold, "Minimum grade counted as relevant")->check(CLI::PositiveNumber);
  gap->add_option("--m", m, "Bonferroni family size")->check(CLI::PositiveNumber);
  gap->add_flag("--strict", strict, "Treat rank gaps and score inversions as errors");
  gap->add_option("--output", output, "Key-value output file (default stdout)");

  // overlap
  std::string run_a, run_b;
  std::size_t threshold = 3;
  auto* overlap = app.add_subcommand("overlap", "Top-k overlap between two runs");
  add_common(overlap);
  overlap->add_option("--run-a", run_a, "First run")->required();
  overlap->add_option("--run-b", run_b, "Second run")->required();
  overlap->add_option("--k", k, "Cutoff (default 10)");
  overlap->add_option("--threshold", threshold, "Report queries with overlap at or below this");
  overlap->add_flag("--strict", strict, "Treat rank gaps and score inversions as errors");
  overlap->add_option("--output", output, "Key-value output file (default stdout)");

  // mix-train
  std::string triples_path, out_queries, out_triples, metadata_path;
  bool exact_half = false;
  std::optional<std::size_t> max_unmapped;
  auto* mix = app.add_subcommand("mix-train", "Build an N / 50 / T training set");
  add_common(mix);
  add_tables(mix);
  mix->add_option("--queries", queries_path, "Query file")->required();
  mix->add_option("--triples", triples_path, "Training triples (qid<TAB>pos<TAB>neg)");
  mix->add_option("--collection", collection, "Collection, required with --triples");
  mix->add_option("--config", config, "N, 50 or T");
  mix->add_option("--seed", seed, "Seed for the 50 configuration");
  mix->add_flag("--exact-half", exact_half, "Romanize exactly half the queries (seeded shuffle)");
  mix->add_option("--max-unmapped", max_unmapped, "Fail above this many unmapped characters");
  mix->add_option("--out-queries", out_queries, "Mixed query file (default stdout)");
  mix->add_option("--out-triples", out_triples, "Mixed triples file (query text resolved, docs untouched)");
  mix->add_option("--metadata", metadata_path, "Sidecar metadata JSON (default <out-queries>.meta.json)");

  // gen-synth
  std::string out_dir;
  toy::SyntheticConfig synth;
  bool han = false;
  auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic corpus, queries, qrels and triples");
  add_common(gen);
  gen->add_option("--seed", seed, "Generator seed");
  gen->add_option("--out-dir", out_dir, "Output directory")->required();
  gen->add_option("--n-docs", synth.n_docs, "Documents");
  gen->add_option("--doc-len", synth.doc_len, "Words per document");
  gen->add_option("--n-queries", synth.n_queries, "Queries");
  gen->add_option("--query-len", synth.query_len, "Words per query");
  gen->add_flag("--han", han, "Han pseudo-words instead of Cyrillic");

  // train-toy
  std::string model_path, log_path;
  toy::TrainConfig train_cfg;
  std::size_t hash_dim = std::size_t{1} << 15, emb_dim = 64;
  int ngram = 3;
  auto* train_cmd = app.add_subcommand("train-toy", "Train the character n-gram dual encoder");
  add_common(train_cmd);
  add_tables(train_cmd);
  train_cmd->add_option("--triples", triples_path, "Training triples")->required();
  train_cmd->add_option("--queries", queries_path, "Query file the triples refer to")->required();
  train_cmd->add_option("--collection", collection, "Collection")->required();
  train_cmd->add_option("--config", config, "N, 50 or T: how queries are mixed before training");
  train_cmd->add_option("--seed", seed, "Seed for initialisation, batch shuffling and mixing");
  train_cmd->add_option("--epochs", train_cfg.epochs, "Epochs");
  train_cmd->add_option("--batch-size", train_cfg.batch_size, "Batch size");
  train_cmd->add_option("--lr", train_cfg.learning_rate, "Learning rate");
  train_cmd->add_option("--temperature", train_cfg.temperature, "Softmax temperature");
  train_cmd->add_option("--hash-dim", hash_dim, "Hash buckets (power of two)");
  train_cmd->add_option("--emb-dim", emb_dim, "Embedding size");
  train_cmd->add_option("--ngram", ngram, "Character n-gram size");
  train_cmd->add_option("--output", model_path, "Model checkpoint")->required();
  train_cmd->add_option("--log", log_path, "Training log (default stderr)");

  // rank-toy
  auto* rank = app.add_subcommand("rank-toy", "Rank a collection with a trained encoder");
  add_common(rank);
  add_threads(rank);
  rank->add_option("--model", model_path, "Model checkpoint")->required();
  rank->add_option("--queries", queries_path, "Query file")->required();
  rank->add_option("--collection", collection, "Collection")->required();
  rank->add_option("--k", k, "Depth (default 1000)");
  rank->add_option("--tag", tag, "Run tag");
  rank->add_option("--output", output, "Run file (default stdout)");

  // dump-index
  auto* dump = app.add_subcommand("dump-index", "Print an index in readable form");
  add_common(dump);
  dump->add_option("--index", index_path, "Index file")->required();
  dump->add_option("--output", output, "Output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int status = app.exit(e, out, err);
    return status == 0 ? kSuccess : kUsageError;
  }

  CLI::App* sub = app.get_subcommands().front();
  Context ctx{in, out, err, Manifest(sub->get_name(), args)};

  try {
    if (sub == romanize) {
      auto r = load_tables(ctx, tables);
      RomanizeOptions opts{han_separator};
      std::string text = ctx.read(input);
      std::string result;
      std::size_t unmapped = 0;
      auto lines = split_lines(text);
      for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string_view line = lines[i];
        if (i + 1 == lines.size() && line.empty()) break;
        if (queries_mode) {
          auto tab = line.find('\t');
          if (tab == std::string_view::npos)
            throw ParseError(i + 1, "expected qid<TAB>text");
          auto rom = r.romanize(line.substr(tab + 1), opts);
          unmapped += rom.unmapped_count;
          result.append(line.substr(0, tab + 1)).append(rom.output);
        } else {
          auto rom = r.romanize(line, opts);
          unmapped += rom.unmapped_count;
          result += rom.output;
        }
        result += '\n';
      }
      if (unmapped) ctx.err << "warning: " << unmapped << " unmapped character(s) passed through\n";
      ctx.write(output, result);
    } else if (sub == index) {
      auto docs = read_collection(ctx.read(collection));
      auto idx = InvertedIndex::build(docs, parse_tokenizer(tokenizer_spec), {k1, b});
      ctx.write(index_path, idx.serialize());
    } else if (sub == search_cmd) {
      auto idx = InvertedIndex::deserialize(ctx.read(index_path));
      auto queries = read_queries(ctx.read(queries_path));
      Bm25Params params = idx.default_params();
      if (search_k1) params.k1 = *search_k1;
      if (search_b) params.b = *search_b;
      auto run = search_all(idx, queries, k ? k : 1000, params, threads);
      ctx.write(output, write_run(run, tag));
    } else if (sub == evaluate_cmd) {
      auto run = load_run(ctx, run_path, strict);
      auto qrels = read_qrels(ctx.read(qrels_path));
      if (metrics.empty()) metrics.push_back("mrr@10");
      std::string report;
      for (const auto& spec : metrics) {
        auto metric = parse_metric(spec);
        metric.rel_threshold = rel_threshold;
        auto scores = evaluate(run, qrels, metric, {});
        report += format_scores(metric.describe(), scores);
        if (!scores.skipped.empty())
          ctx.err << metric.describe() << ": skipped " << scores.skipped.size()
                  << " quer" << (scores.skipped.size() == 1 ? "y" : "ies") << " without relevant judgments\n";
      }
      ctx.write(output, report);
    } else if (sub == gap) {
      auto native = load_run(ctx, native_path, strict);
      auto translit = load_run(ctx, translit_path, strict);
      auto qrels = read_qrels(ctx.read(qrels_path));
      auto metric = parse_metric(metrics.empty() ? "mrr@10" : metrics.front());
      metric.rel_threshold = rel_threshold;
      auto report = gap_report(native, translit, qrels, metric, m);
      ctx.err << report.metric.describe() << ": native " << report.native_mean << ", transliterated "
              << report.translit_mean << ", drop " << report.relative_drop * 100.0 << "%, corrected p "
              << report.corrected_p << " (n=" << report.n_queries << ", m=" << report.m << ")\n";
      ctx.write(output, format_gap_report(report));
    } else if (sub == overlap) {
      auto a = load_run(ctx, run_a, strict);
      auto bb = load_run(ctx, run_b, strict);
      ctx.write(output, format_overlap(topk_overlap(a, bb, k ? k : 10, threshold)));
    } else if (sub == mix) {
      auto r = load_tables(ctx, tables);
      MixConfig cfg{parse_mix_mode(config), seed, exact_half, max_unmapped};
      ctx.manifest.seed("mix", seed);
      auto queries = read_queries(ctx.read(queries_path));
      MixStats stats;
      auto mixed = build_mixed_queries(queries, cfg, r, &stats);
      if (!triples_path.empty()) {
        if (collection.empty()) throw ValidationError("--triples needs --collection to resolve document ids");
        auto docs = read_collection(ctx.read(collection));
        auto triples = read_triples(ctx.read(triples_path), queries, docs);
        // Triples point at qids; the mixed query file carries their text.
        auto out_t = build_training_triples(triples, cfg, r);
        if (!out_triples.empty()) ctx.write(out_triples, write_triples(out_t));
      }
      print_warnings(ctx, stats.warnings);
      ctx.write(out_queries, write_queries(mixed));
      std::string meta = metadata_path;
      if (meta.empty() && !out_queries.empty() && out_queries != "-") meta = out_queries + ".meta.json";
      if (!meta.empty()) ctx.write(meta, mix_metadata_json(cfg, r, stats));
      ctx.err << "romanized " << stats.romanized << " of " << stats.total << " queries (config "
              << mix_mode_name(cfg.mode) << ", seed " << seed << ")\n";
    } else if (sub == gen) {
      synth.seed = seed;
      synth.script = han ? toy::SyntheticScript::Han : toy::SyntheticScript::Cyrillic;
      ctx.manifest.seed("generator", seed);
      auto corpus = toy::gen_synthetic_corpus(synth);
      fs::create_directories(out_dir);
      auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };
      ctx.write(path("collection.tsv"), write_collection(corpus.collection));
      ctx.write(path("queries.tsv"), write_queries(corpus.queries));
      ctx.write(path("qrels.txt"), write_qrels(corpus.qrels));
      ctx.write(path("triples.tsv"), write_triples(corpus.triples));
    } else if (sub == train_cmd) {
      auto docs = read_collection(ctx.read(collection));
      auto queries = read_queries(ctx.read(queries_path));
      auto triples = read_triples(ctx.read(triples_path), queries, docs);
      MixConfig cfg{parse_mix_mode(config), seed, false, std::nullopt};
      if (cfg.mode != MixMode::Native) triples = build_training_triples(triples, cfg, load_tables(ctx, tables));
      train_cfg.seed = seed;
      ctx.manifest.seed("train", seed);
      auto init = toy::EncoderParams::init(hash_dim, emb_dim, ngram, seed);
      toy::TrainLog log;
      auto model = toy::train(triples, docs, init, train_cfg, &log);
      ctx.write(model_path, model.serialize());
      if (log_path.empty()) ctx.err << log.format();
      else ctx.write(log_path, log.format());
    } else if (sub == rank) {
      auto model = toy::EncoderParams::deserialize(ctx.read(model_path));
      auto queries = read_queries(ctx.read(queries_path));
      auto docs = read_collection(ctx.read(collection));
      auto run = toy::encode_and_rank(model, queries, docs, k ? k : 1000, threads);
      ctx.write(output, write_run(run, tag));
    } else if (sub == dump) {
      ctx.write(output, InvertedIndex::deserialize(ctx.read(index_path)).dump());
    }
    if (!manifest_path.empty()) write_file(manifest_path, ctx.manifest.dump());
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  }
  return kSuccess;
}

}  // namespace scriptgap::cli
