// Copyright 2026 The Anoncloud Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ANONCLOUD_JOB_H_
#define ANONCLOUD_JOB_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Toy job algebra executed by slave nodes. Every operation is an associative
// fold, so a job split into contiguous chunks and recombined in index order
// gives the same value as evaluating it whole.
//
//   job     := op "[" [ item { "," item } ] "]"
//   op      := "sum" | "min" | "max" | "concat"
//   item    := integer | string
//   integer := [ "-" ] digit { digit }
//   string  := '"' { char | '\"' | '\\' } '"'
//
// sum/min/max take integers only. concat takes integers and strings and joins
// their text (integers in decimal). Whitespace between tokens is ignored.
namespace anoncloud::compute {

enum class JobOp { kSum, kMin, kMax, kConcat };

using JobItem = std::variant<std::int64_t, std::string>;
using JobValue = std::variant<std::int64_t, std::string>;

struct JobExpr {
  JobOp op = JobOp::kSum;
  std::vector<JobItem> items;

  friend bool operator==(const JobExpr&, const JobExpr&) = default;
};

// Throws Error(kEvalError) on malformed text.
JobExpr ParseJob(std::string_view text);
std::string FormatJob(const JobExpr& job);

// nullopt for min/max over no items, which have no identity element.
std::optional<JobValue> EvaluatePartial(const JobExpr& job);
// Whole-job evaluation; throws kEvalError where EvaluatePartial is empty.
JobValue Evaluate(const JobExpr& job);
std::optional<JobValue> Combine(JobOp op,
                                std::span<const std::optional<JobValue>> parts);

// "i:<n>", "s:<text>" or "none". Round-trips through ParseValue.
std::string FormatValue(const std::optional<JobValue>& value);
std::optional<JobValue> ParseValue(std::string_view text);

std::string_view OpName(JobOp op);

}  // namespace anoncloud::compute

#endif  // ANONCLOUD_JOB_H_
