// Copyright 2026 The mcqorder Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcqorder/eval.hpp"

#include <atomic>
#include <thread>
#include <vector>

#include "mcqorder/orderings.hpp"

namespace mcqorder {

std::vector<MCQItem> demos_for(const MCQItem& target, const FewShotConfig& fewshot) {
  if (fewshot.shots == 0) return {};
  if (fewshot.shots < 0) throw ConfigError("shots must be >= 0");
  if (fewshot.pool == nullptr) {
    throw ConfigError("few-shot evaluation needs a demonstration pool");
  }
  return select_demonstrations(target, *fewshot.pool, fewshot.shots).demos;
}

std::optional<Prediction> query_choice_with_demos(CompletionClient& client,
                                                  const std::string& model_id,
                                                  const OrderedItem& ordered,
                                                  const std::vector<MCQItem>& demos,
                                                  const FewShotConfig& fewshot,
                                                  const RunOptions& options) {
  std::string prompt;
  if (demos.empty()) {
    prompt = render_mcq_prompt(options.templates, ordered);
  } else if (fewshot.co_reorder_demos) {
    // Ablation: demonstrations of the same size follow the target's
    // ordering; other sizes keep their configured policy.
    std::string assembled;
    for (size_t i = 0; i < demos.size(); ++i) {
      const MCQItem& demo = demos[i];
      Ordering ordering = Ordering::identity(demo.option_count());
      if (demo.option_count() == ordered.size()) {
        ordering = ordered.ordering;
      } else if (fewshot.policy == DemoOrderingPolicy::random) {
        ordering = sample_orderings(demo.option_count(), 1, item_seed(fewshot.demo_seed, i),
                                    /*include_identity=*/false)
                       .front();
      }
      const OrderedItem ordered_demo = apply_ordering(demo, ordering);
      assembled += render_mcq_prompt(options.templates, ordered_demo);
      assembled += ' ';
      assembled += ordered_demo.gold_letter();
      assembled += "\n\n";
    }
    assembled += render_mcq_prompt(options.templates, ordered);
    prompt = std::move(assembled);
  } else {
    prompt = render_fewshot_prompt(options.templates, demos, ordered, fewshot.policy,
                                   fewshot.demo_seed)
                 .prompt;
  }
  ModelRequest request;
  request.model_id = model_id;
  request.prompt = std::move(prompt);
  request.max_tokens = options.answer_max_tokens;
  request.temperature = options.temperature;
  const ModelResponse response = client.complete(request);
  return make_prediction(response.text, ordered);
}

std::optional<Prediction> query_choice(CompletionClient& client, const std::string& model_id,
                                       const OrderedItem& ordered, const FewShotConfig& fewshot,
                                       const RunOptions& options) {
  return query_choice_with_demos(client, model_id, ordered, demos_for(ordered.item, fewshot),
                                 fewshot, options);
}

void parallel_map(int count, int workers, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<size_t>(count));
  std::vector<std::thread> threads;
  const int spawn = std::min(workers, count);
  threads.reserve(static_cast<size_t>(spawn));
  for (int t = 0; t < spawn; ++t) {
    threads.emplace_back([&]() {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& thread : threads) thread.join();
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
}

}  // namespace mcqorder
