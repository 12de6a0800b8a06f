#include "bilex/retrieval.hpp"

#include "json.hpp"

#include "bilex/util.hpp"

namespace bilex {

GoldLexicon read_gold(const std::filesystem::path& path) {
  GoldLexicon gold;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto cols = split(lines[i], '\t');
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) {
      throw FormatError(path.string() + ": expected src<TAB>tgt at line " + std::to_string(i + 1));
    }
    gold.entries[cols[0]].insert(cols[1]);
  }
  return gold;
}

void write_gold(const GoldLexicon& gold, const std::filesystem::path& path) {
  write_file_atomic(path, [&](std::ostream& out) {
    for (const auto& [src, tgts] : gold.entries)
      for (const auto& t : tgts) out << src << '\t' << t << '\n';
  });
}

EvalReport precision_at_k(const std::vector<QueryPrediction>& predictions, const GoldLexicon& gold,
                          const std::vector<std::size_t>& ks) {
  EvalReport report;
  std::map<std::size_t, std::size_t> hits;
  for (auto k : ks) {
    if (k < 1) throw ParameterError("precision_at_k: k must be >= 1");
    hits[k] = 0;
  }
  for (const auto& pred : predictions) {
    const auto it = gold.entries.find(pred.source);
    if (it == gold.entries.end()) throw ParameterError("precision_at_k: query '" + pred.source + "' is not in the gold lexicon");
    QueryOutcome outcome;
    outcome.source = pred.source;
    ++report.evaluated;
    if (!pred.ranked) {
      report.skipped.push_back(pred.source);
      report.per_query.push_back(std::move(outcome));
      continue;
    }
    outcome.ranked = *pred.ranked;
    for (std::size_t r = 0; r < outcome.ranked.size(); ++r) {
      if (it->second.count(outcome.ranked[r])) {
        outcome.first_hit_rank = r + 1;
        break;
      }
    }
    if (outcome.first_hit_rank) {
      for (auto& [k, h] : hits)
        if (*outcome.first_hit_rank <= k) ++h;
    }
    report.per_query.push_back(std::move(outcome));
  }
  for (const auto& [k, h] : hits) {
    report.p_at[k] = report.evaluated == 0 ? 0.0 : static_cast<double>(h) / static_cast<double>(report.evaluated);
  }
  return report;
}

void write_report_summary(const std::vector<NamedReport>& reports, const std::filesystem::path& path) {
  write_file_atomic(path, [&](std::ostream& out) {
    out << "system\tevaluated\tskipped";
    if (!reports.empty())
      for (const auto& [k, p] : reports.front().report.p_at) out << "\tp@" << k;
    out << '\n';
    for (const auto& r : reports) {
      out << r.system << '\t' << r.report.evaluated << '\t' << r.report.skipped.size();
      for (const auto& [k, p] : r.report.p_at) out << '\t' << format_double(p);
      out << '\n';
    }
  });
}

void write_report_detail(const std::vector<NamedReport>& reports, const std::filesystem::path& path) {
  write_file_atomic(path, [&](std::ostream& out) {
    for (const auto& r : reports) {
      for (const auto& q : r.report.per_query) {
        out << r.system << '\t' << q.source << '\t';
        if (q.first_hit_rank) out << *q.first_hit_rank;
        else out << '-';
        out << '\t';
        if (q.ranked.empty()) out << "<oov>";
        for (std::size_t i = 0; i < q.ranked.size(); ++i) out << (i ? " " : "") << q.ranked[i];
        out << '\n';
      }
    }
  });
}

void write_report_json(const std::vector<NamedReport>& reports, const std::filesystem::path& path) {
  nlohmann::ordered_json root = nlohmann::ordered_json::object();
  for (const auto& r : reports) {
    nlohmann::ordered_json p = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.report.p_at) p[std::to_string(k)] = v;
    root[r.system] = {{"p_at", p}, {"evaluated", r.report.evaluated}, {"skipped", r.report.skipped}};
  }
  write_file_atomic(path, [&](std::ostream& out) { out << root.dump(2) << '\n'; });
}

void write_predictions(const std::vector<std::pair<std::string, std::vector<QueryPrediction>>>& systems,
                       const std::filesystem::path& path) {
  write_file_atomic(path, [&](std::ostream& out) {
    for (const auto& [system, preds] : systems) {
      for (const auto& p : preds) {
        out << system << '\t' << p.source << '\t';
        if (!p.ranked) {
          out << "<oov>";
        } else {
          for (std::size_t i = 0; i < p.ranked->size(); ++i) out << (i ? " " : "") << (*p.ranked)[i];
        }
        out << '\n';
      }
    }
  });
}

std::vector<std::pair<std::string, std::vector<QueryPrediction>>> read_predictions(const std::filesystem::path& path) {
  std::vector<std::pair<std::string, std::vector<QueryPrediction>>> systems;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto cols = split(lines[i], '\t');
    if (cols.size() != 3) throw FormatError(path.string() + ": expected 3 columns at line " + std::to_string(i + 1));
    if (systems.empty() || systems.back().first != cols[0]) systems.emplace_back(cols[0], std::vector<QueryPrediction>{});
    QueryPrediction p{cols[1], std::nullopt};
    if (cols[2] != "<oov>") {
      std::vector<std::string> ranked;
      for (auto& t : split(cols[2], ' '))
        if (!t.empty()) ranked.push_back(t);
      p.ranked = std::move(ranked);
    }
    systems.back().second.push_back(std::move(p));
  }
  return systems;
}

}  // namespace bilex
