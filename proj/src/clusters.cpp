// Apache License, Version 2.0, refer to LICENSE.txt
#include "emodist/clusters.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "emodist/errors.hpp"
#include "emodist/io.hpp"
#include "emodist/tasks.hpp"
#include "emodist/unicode.hpp"

namespace emodist {

using nlohmann::json;

EmojiInventory top_k_emojis(const FrequencyTable& freqs, int k) {
  if (k < 1) throw ConfigError("top_k_emojis k must be >= 1");
  std::vector<std::pair<std::string, std::int64_t>> emojis;
  for (const auto& [token, count] : freqs.counts)
    if (uni::is_emoji_token(token)) emojis.emplace_back(token, count);
  if (emojis.empty()) throw DataError("corpus contains no emoji");
  std::sort(emojis.begin(), emojis.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  EmojiInventory inv;
  inv.requested_k = k;
  inv.truncated = static_cast<int>(emojis.size()) < k;
  const auto take = std::min<std::size_t>(emojis.size(),
                                          static_cast<std::size_t>(k));
  inv.emojis.assign(emojis.begin(), emojis.begin() + static_cast<long>(take));
  return inv;
}

std::string provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kmeans: return "kmeans";
    case Provenance::pmi_swear: return "pmi-swear";
    case Provenance::pmi_target: return "pmi-target";
  }
  throw ConfigError("unknown provenance");
}

Provenance provenance_from_name(const std::string& name) {
  if (name == "kmeans") return Provenance::kmeans;
  if (name == "pmi-swear") return Provenance::pmi_swear;
  if (name == "pmi-target") return Provenance::pmi_target;
  throw ConfigError("unknown cluster provenance '" + name + "'");
}

namespace {

// Comma-joined labels of classes with no assigned emoji, for metadata.
std::string empty_classes_of(const std::vector<std::string>& classes,
                             const std::map<std::string, std::string>& assign) {
  std::set<std::string> used;
  for (const auto& [e, c] : assign) used.insert(c);
  std::string out;
  for (const auto& c : classes) {
    if (used.count(c)) continue;
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

}  // namespace

void ClusterSpec::validate() const {
  if (name.empty()) throw DataError("cluster spec has no name");
  if (classes.empty()) throw DataError("cluster spec has no classes");
  std::set<std::string> class_set(classes.begin(), classes.end());
  if (class_set.size() != classes.size())
    throw DataError("cluster spec classes are not distinct");
  if (assignment.empty())
    throw DataError("cluster spec '" + name + "' assigns no emoji");
  std::set<std::string> used;
  for (const auto& [emoji, cls] : assignment) {
    if (emoji.empty()) throw DataError("cluster spec maps an empty emoji");
    if (!class_set.count(cls))
      throw DataError("cluster spec assigns unknown class '" + cls + "'");
    used.insert(cls);
  }
  // Every class is the image of some emoji or is flagged empty.
  const auto flagged_it = metadata.find("empty_classes");
  const std::string flagged =
      flagged_it == metadata.end() ? "" : flagged_it->second;
  for (const auto& c : classes) {
    if (used.count(c)) continue;
    if (("," + flagged + ",").find("," + c + ",") == std::string::npos)
      throw DataError("class '" + c +
                      "' has no emoji and is not flagged empty");
  }
}

void save_cluster_spec(const ClusterSpec& spec, const std::string& path) {
  spec.validate();
  json doc;
  doc["name"] = spec.name;
  doc["provenance"] = provenance_name(spec.provenance);
  doc["classes"] = spec.classes;
  doc["assignment"] = spec.assignment;
  doc["metadata"] = spec.metadata;
  write_file(path, doc.dump(2) + "\n");
}

ClusterSpec load_cluster_spec(const std::string& path) {
  json doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw DataError("'" + path + "' is not a cluster spec document");
  ClusterSpec spec;
  try {
    spec.name = doc.at("name").get<std::string>();
    spec.provenance = provenance_from_name(doc.at("provenance"));
    spec.classes = doc.at("classes").get<std::vector<std::string>>();
    spec.assignment =
        doc.at("assignment").get<std::map<std::string, std::string>>();
    spec.metadata =
        doc.at("metadata").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  spec.validate();
  return spec;
}

ClusterSpec merge_clusters(
    const KMeansResult& result,
    const std::map<int, std::optional<std::string>>& merge_map,
    const std::string& name) {
  const int k = result.k();
  for (const auto& [idx, label] : merge_map)
    if (idx < 0 || idx >= k)
      throw ConfigError("merge map references nonexistent cluster " +
                        std::to_string(idx));
  for (int c = 0; c < k; ++c)
    if (!merge_map.count(c))
      throw ConfigError("merge map neither maps nor drops cluster " +
                        std::to_string(c));

  ClusterSpec spec;
  spec.name = name;
  spec.provenance = Provenance::kmeans;
  for (int c = 0; c < k; ++c) {
    const auto& label = merge_map.at(c);
    if (!label) continue;
    if (std::find(spec.classes.begin(), spec.classes.end(), *label) ==
        spec.classes.end())
      spec.classes.push_back(*label);
  }
  if (spec.classes.empty())
    throw ConfigError("merge map drops every cluster");
  for (const auto& [emoji, cluster] : result.assignment) {
    const auto& label = merge_map.at(cluster);
    if (label) spec.assignment.emplace(emoji, *label);
  }

  std::ostringstream mm;
  for (int c = 0; c < k; ++c) {
    if (c) mm << ',';
    mm << c << ':' << (merge_map.at(c) ? *merge_map.at(c) : "<dropped>");
  }
  spec.metadata["merge_map"] = mm.str();
  spec.metadata["kmeans_k"] = std::to_string(k);
  spec.metadata["kmeans_seed"] = std::to_string(result.seed);
  {
    std::ostringstream inertia;
    inertia.precision(17);
    inertia << result.inertia;
    spec.metadata["kmeans_inertia"] = inertia.str();
  }
  const auto empty = empty_classes_of(spec.classes, spec.assignment);
  if (!empty.empty()) spec.metadata["empty_classes"] = empty;
  spec.validate();
  return spec;
}

ClusterSpec build_swear_clusters(const std::vector<Comment>& corpus,
                                 const SlurLexicon& lexicon,
                                 const PmiOptions& options,
                                 const std::string& name) {
  const FrequencyTable freqs = build_frequency_table(corpus);
  std::vector<std::string> emojis;
  for (const auto& [token, count] : freqs.counts)
    if (uni::is_emoji_token(token) && count >= options.min_emoji_count)
      emojis.push_back(token);
  if (emojis.empty())
    throw DataError("no emoji reaches min_emoji_count " +
                    std::to_string(options.min_emoji_count));
  std::sort(emojis.begin(), emojis.end());
  std::map<std::string, int> emoji_index;
  for (std::size_t i = 0; i < emojis.size(); ++i)
    emoji_index.emplace(emojis[i], static_cast<int>(i));

  const std::vector<std::string> classes = {"slur", "neutral"};
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(emojis.size()), 2);
  std::int64_t slur_comments = 0;
  std::set<int> seen;  // distinct emojis of one comment
  for (const auto& comment : corpus) {
    const bool slur = contains_slur(comment, lexicon);
    if (slur) ++slur_comments;
    const int cls = slur ? 0 : 1;
    seen.clear();
    for (const auto& e : comment.emojis) {
      const auto it = emoji_index.find(e);
      if (it != emoji_index.end()) seen.insert(it->second);
    }
    for (const int e : seen) joint(e, cls) += 1.0;
  }
  if (slur_comments == 0)
    throw DataError(
        "no comment contains a slur; the lexicon/corpus pairing is unusable");

  const PmiTable table =
      PmiTable::from_counts(emojis, classes, joint, options.alpha);

  ClusterSpec spec;
  spec.name = name;
  spec.provenance = Provenance::pmi_swear;
  spec.classes = classes;
  for (std::size_t i = 0; i < emojis.size(); ++i) {
    const int e = static_cast<int>(i);
    // Slur wins only on strictly larger PMI; ties are neutral.
    spec.assignment.emplace(emojis[i],
                            table.greater(e, 0, 1) ? "slur" : "neutral");
  }
  spec.metadata["formula"] = PmiTable::formula_string();
  {
    std::ostringstream alpha;
    alpha << options.alpha;
    spec.metadata["alpha"] = alpha.str();
  }
  spec.metadata["min_emoji_count"] = std::to_string(options.min_emoji_count);
  spec.metadata["counting"] = "comment incidence";
  spec.metadata["n_comments"] = std::to_string(corpus.size());
  spec.metadata["n_slur_comments"] = std::to_string(slur_comments);
  const auto empty = empty_classes_of(spec.classes, spec.assignment);
  if (!empty.empty()) spec.metadata["empty_classes"] = empty;
  spec.validate();
  return spec;
}

ClusterSpec build_target_clusters(const TaskDataset& tt_train, double alpha,
                                  const std::string& name) {
  tt_train.validate();
  const auto& classes = tt_train.labels;
  std::map<std::string, int> class_index;
  for (std::size_t i = 0; i < classes.size(); ++i)
    class_index.emplace(classes[i], static_cast<int>(i));

  // Distinct-per-instance incidence counts, emojis discovered on the fly.
  std::map<std::string, std::vector<std::int64_t>> counts;
  std::set<std::string> seen;
  for (const auto& inst : tt_train.instances) {
    seen.clear();
    for (const auto& tok : inst.tokens)
      if (uni::is_emoji_token(tok)) seen.insert(tok);
    const int cls = class_index.at(inst.label);
    for (const auto& e : seen) {
      auto& row = counts[e];
      if (row.empty()) row.assign(classes.size(), 0);
      ++row[static_cast<std::size_t>(cls)];
    }
  }
  if (counts.empty())
    throw DataError("target task '" + tt_train.name + "' contains no emoji");

  std::vector<std::string> emojis;
  emojis.reserve(counts.size());
  Eigen::MatrixXd joint(static_cast<Eigen::Index>(counts.size()),
                        static_cast<Eigen::Index>(classes.size()));
  Eigen::Index row = 0;
  for (const auto& [emoji, cls_counts] : counts) {
    emojis.push_back(emoji);
    for (std::size_t c = 0; c < classes.size(); ++c)
      joint(row, static_cast<Eigen::Index>(c)) =
          static_cast<double>(cls_counts[c]);
    ++row;
  }
  const PmiTable table = PmiTable::from_counts(emojis, classes, joint, alpha);

  // Lexicographic class order decides ties: a later class must be strictly
  // greater to win the argmax.
  std::vector<int> lex_order(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i)
    lex_order[i] = static_cast<int>(i);
  std::sort(lex_order.begin(), lex_order.end(),
            [&](int a, int b) { return classes[a] < classes[b]; });

  ClusterSpec spec;
  spec.name = name;
  spec.provenance = Provenance::pmi_target;
  spec.classes = classes;
  for (std::size_t i = 0; i < emojis.size(); ++i) {
    int best = lex_order.front();
    for (std::size_t k = 1; k < lex_order.size(); ++k)
      if (table.greater(static_cast<int>(i), lex_order[k], best))
        best = lex_order[k];
    spec.assignment.emplace(emojis[i], classes[static_cast<std::size_t>(best)]);
  }
  spec.metadata["formula"] = PmiTable::formula_string();
  {
    std::ostringstream a;
    a << alpha;
    spec.metadata["alpha"] = a.str();
  }
  spec.metadata["counting"] = "instance incidence";
  spec.metadata["target_task"] = tt_train.name;
  const auto empty = empty_classes_of(spec.classes, spec.assignment);
  if (!empty.empty()) spec.metadata["empty_classes"] = empty;
  spec.validate();
  return spec;
}

}  // namespace emodist
