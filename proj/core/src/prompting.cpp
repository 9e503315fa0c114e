// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcqorder/prompting.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "mcqorder/orderings.hpp"

namespace mcqorder {

namespace {

constexpr const char kDefaultMcq[] =
    "Choose the answer to the question only from {letters} choices. "
    "Question: {question}. Choices: {choices}. Answer:";

constexpr const char kDefaultSelfVerify[] =
    "Can more than one of the choices be a highly probable answer to the question? "
    "Please respond with 'yes' or 'no'. "
    "Question: {question}. Choices: {choices}. Answer:";

constexpr const char kDefaultSort[] =
    "Sort the choices in descending order of probability of being the correct answer "
    "to the question. Output only the letters, comma-separated, using each of {letters} "
    "exactly once. Question: {question}. Choices: {choices}. Answer:";

constexpr const char kDefaultMec[] =
    "Answer the following multiple-choice question by reasoning step by step over each "
    "of the {letters} choices, then conclude with your final answer on a new line in the "
    "exact form 'Answer: <letter>'. "
    "Question: {question}. Choices: {choices}. Explanation:";

std::string replace_all(std::string text, const std::string& token, const std::string& value) {
  size_t pos = 0;
  while ((pos = text.find(token, pos)) != std::string::npos) {
    text.replace(pos, token.size(), value);
    pos += value.size();
  }
  return text;
}

std::string render_template(const std::string& tmpl, const OrderedItem& ordered) {
  std::string out = tmpl;
  out = replace_all(std::move(out), "{question}", ordered.item.question);
  out = replace_all(std::move(out), "{choices}", render_choices(ordered));
  out = replace_all(std::move(out), "{letters}", letter_list_phrase(ordered.size()));
  return out;
}

std::string trim_copy(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> tokenize_words(const std::string& text) {
  std::vector<std::string> words;
  std::string current;
  for (const char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::vector<std::vector<double>> lexical_embed(const std::vector<std::string>& texts) {
  std::set<std::string> vocab;
  std::vector<std::vector<std::string>> tokenized;
  tokenized.reserve(texts.size());
  for (const auto& text : texts) {
    tokenized.push_back(tokenize_words(text));
    vocab.insert(tokenized.back().begin(), tokenized.back().end());
  }
  std::map<std::string, size_t> index;
  size_t next = 0;
  for (const auto& word : vocab) index[word] = next++;
  std::vector<std::vector<double>> vectors;
  vectors.reserve(texts.size());
  for (const auto& words : tokenized) {
    std::vector<double> v(vocab.size(), 0.0);
    for (const auto& word : words) v[index[word]] += 1.0;
    vectors.push_back(std::move(v));
  }
  return vectors;
}

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace

std::string to_string(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::mcq:
      return "mcq";
    case TemplateKind::self_verify:
      return "self_verify";
    case TemplateKind::sort:
      return "sort";
    case TemplateKind::mec:
      return "mec";
  }
  throw ConfigError("unknown template kind");
}

TemplateSet TemplateSet::defaults() {
  TemplateSet set;
  set.mcq = kDefaultMcq;
  set.self_verify = kDefaultSelfVerify;
  set.sort = kDefaultSort;
  set.mec = kDefaultMec;
  return set;
}

TemplateSet TemplateSet::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open template file: " + path.string());
  TemplateSet set = defaults();
  std::string* target = nullptr;
  std::vector<std::string> lines;
  std::string current_section;
  auto flush = [&]() {
    if (target == nullptr) return;
    while (!lines.empty() && trim_copy(lines.back()).empty()) lines.pop_back();
    std::string joined;
    for (size_t i = 0; i < lines.size(); ++i) {
      if (i > 0) joined += '\n';
      joined += lines[i];
    }
    if (!joined.empty()) *target = joined;
    lines.clear();
  };
  std::string line;
  while (std::getline(in, line)) {
    const std::string stripped = trim_copy(line);
    if (!stripped.empty() && stripped.front() == '[' && stripped.back() == ']') {
      flush();
      current_section = stripped.substr(1, stripped.size() - 2);
      if (current_section == "mcq") {
        target = &set.mcq;
      } else if (current_section == "self_verify") {
        target = &set.self_verify;
      } else if (current_section == "sort") {
        target = &set.sort;
      } else if (current_section == "mec") {
        target = &set.mec;
      } else {
        throw ConfigError("unknown template section [" + current_section + "] in " +
                          path.string());
      }
      continue;
    }
    if (!stripped.empty() && stripped.front() == '#') continue;
    if (target != nullptr) {
      if (!(lines.empty() && stripped.empty())) lines.push_back(line);
    } else if (!stripped.empty()) {
      throw ConfigError("template text before any section header in " + path.string());
    }
  }
  flush();
  return set;
}

const std::string& TemplateSet::for_kind(TemplateKind kind) const {
  switch (kind) {
    case TemplateKind::mcq:
      return mcq;
    case TemplateKind::self_verify:
      return self_verify;
    case TemplateKind::sort:
      return sort;
    case TemplateKind::mec:
      return mec;
  }
  throw ConfigError("unknown template kind");
}

std::string letter_list_phrase(int n) {
  if (n < kMinOptions || n > kMaxOptions) {
    throw UnsupportedN("no letter phrase for n=" + std::to_string(n));
  }
  if (n == 2) return "A and B";
  std::string out;
  for (int i = 0; i < n - 1; ++i) {
    out += letter_for(i);
    out += ", ";
  }
  out += "and ";
  out += letter_for(n - 1);
  return out;
}

std::string render_choices(const OrderedItem& ordered) {
  std::string out;
  for (int p = 0; p < ordered.size(); ++p) {
    if (p > 0) out += ' ';
    out += letter_for(p);
    out += ") ";
    out += ordered.option_at(p);
  }
  return out;
}

std::string render_mcq_prompt(const TemplateSet& templates, const OrderedItem& ordered) {
  return render_template(templates.mcq, ordered);
}

std::string render_self_verification_prompt(const TemplateSet& templates,
                                            const OrderedItem& ordered) {
  return render_template(templates.self_verify, ordered);
}

std::string render_sort_prompt(const TemplateSet& templates, const OrderedItem& ordered) {
  return render_template(templates.sort, ordered);
}

std::string render_mec_prompt(const TemplateSet& templates, const OrderedItem& ordered) {
  return render_template(templates.mec, ordered);
}

DemonstrationPool make_pool(const Dataset& source, int size, std::uint64_t seed,
                            const Dataset* disjoint_from) {
  if (size < 1) throw ConfigError("pool size must be positive");
  std::set<std::string> excluded;
  if (disjoint_from != nullptr) {
    for (const auto& item : disjoint_from->items) excluded.insert(item.id);
  }
  std::vector<MCQItem> candidates;
  for (const auto& item : source.items) {
    if (excluded.count(item.id) == 0) candidates.push_back(item);
  }
  if (candidates.empty()) throw EmptyPool("no pool candidates after exclusions");
  std::mt19937_64 rng(seed);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  if (static_cast<int>(candidates.size()) > size) {
    candidates.resize(static_cast<size_t>(size));
  }
  DemonstrationPool pool;
  pool.items = std::move(candidates);
  return pool;
}

void validate_pool_disjoint(const DemonstrationPool& pool, const Dataset& eval_set) {
  std::set<std::string> eval_ids;
  for (const auto& item : eval_set.items) eval_ids.insert(item.id);
  for (const auto& item : pool.items) {
    if (eval_ids.count(item.id) != 0) {
      throw ConfigError("demonstration pool overlaps evaluation set at item: " + item.id);
    }
  }
}

DemoSelection select_demonstrations(const MCQItem& target, const DemonstrationPool& pool, int k,
                                    const EmbeddingProvider* provider) {
  if (pool.items.empty()) throw EmptyPool("demonstration pool is empty");
  if (k < 0 || k > static_cast<int>(pool.items.size())) {
    throw KOutOfRange("cannot select " + std::to_string(k) + " demonstrations from a pool of " +
                      std::to_string(pool.items.size()));
  }
  DemoSelection selection;
  if (k == 0) return selection;

  std::vector<std::string> texts;
  texts.reserve(pool.items.size() + 1);
  texts.push_back(target.question);
  for (const auto& item : pool.items) texts.push_back(item.question);

  std::vector<std::vector<double>> vectors;
  if (provider != nullptr && *provider) {
    try {
      vectors = (*provider)(texts);
    } catch (const std::exception&) {
      vectors.clear();
    }
    bool usable = vectors.size() == texts.size() && !vectors.empty();
    if (usable) {
      for (const auto& v : vectors) {
        if (v.size() != vectors.front().size() || v.empty()) {
          usable = false;
          break;
        }
      }
    }
    if (!usable) {
      selection.lexical_fallback = true;
      vectors = lexical_embed(texts);
    }
  } else {
    vectors = lexical_embed(texts);
  }

  std::vector<std::pair<double, size_t>> ranked;
  ranked.reserve(pool.items.size());
  for (size_t i = 0; i < pool.items.size(); ++i) {
    ranked.emplace_back(euclidean(vectors[0], vectors[i + 1]), i);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (int i = 0; i < k; ++i) {
    selection.demos.push_back(pool.items[ranked[static_cast<size_t>(i)].second]);
  }
  return selection;
}

FewShotRender render_fewshot_prompt(const TemplateSet& templates,
                                    const std::vector<MCQItem>& demos,
                                    const OrderedItem& target, DemoOrderingPolicy policy,
                                    std::uint64_t seed) {
  FewShotRender render;
  std::string prompt;
  for (size_t i = 0; i < demos.size(); ++i) {
    const MCQItem& demo = demos[i];
    Ordering ordering = Ordering::identity(demo.option_count());
    if (policy == DemoOrderingPolicy::random) {
      ordering = sample_orderings(demo.option_count(), 1, item_seed(seed, i),
                                  /*include_identity=*/false)
                     .front();
    }
    const OrderedItem ordered = apply_ordering(demo, ordering);
    prompt += render_mcq_prompt(templates, ordered);
    prompt += ' ';
    prompt += ordered.gold_letter();
    prompt += "\n\n";
    render.demo_ids.push_back(demo.id);
  }
  prompt += render_mcq_prompt(templates, target);
  render.prompt = std::move(prompt);
  return render;
}

}  // namespace mcqorder
