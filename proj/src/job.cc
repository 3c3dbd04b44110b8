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

#include "anoncloud/job.h"

#include <cctype>
#include <charconv>

#include "anoncloud/error.h"

namespace anoncloud::compute {

namespace {

constexpr std::size_t kMaxItems = 4096;

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  JobExpr Parse() {
    JobExpr job;
    job.op = ParseOp();
    Expect('[');
    SkipSpace();
    if (Peek() != ']') {
      while (true) {
        job.items.push_back(ParseItem());
        if (job.items.size() > kMaxItems) Fail("too many items");
        SkipSpace();
        if (Peek() == ',') {
          ++pos_;
          continue;
        }
        break;
      }
    }
    Expect(']');
    SkipSpace();
    if (pos_ != text_.size()) Fail("trailing characters");
    if (job.op != JobOp::kConcat) {
      for (const auto& item : job.items) {
        if (!std::holds_alternative<std::int64_t>(item)) {
          Fail(std::string(OpName(job.op)) + " takes integers only");
        }
      }
    }
    return job;
  }

 private:
  [[noreturn]] void Fail(const std::string& what) const {
    throw Error(ErrorCode::kEvalError,
                what + " at offset " + std::to_string(pos_) + " in '" +
                    std::string(text_) + "'");
  }

  char Peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void SkipSpace() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  void Expect(char c) {
    SkipSpace();
    if (Peek() != c) Fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  JobOp ParseOp() {
    SkipSpace();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    std::string_view word = text_.substr(start, pos_ - start);
    if (word == "sum") return JobOp::kSum;
    if (word == "min") return JobOp::kMin;
    if (word == "max") return JobOp::kMax;
    if (word == "concat") return JobOp::kConcat;
    pos_ = start;
    Fail("unknown operation '" + std::string(word) + "'");
  }

  JobItem ParseItem() {
    SkipSpace();
    if (Peek() == '"') return ParseString();
    std::size_t start = pos_;
    if (Peek() == '-') ++pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    std::int64_t value = 0;
    auto [ptr, ec] =
        std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (pos_ == start || ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      Fail("expected integer or string");
    }
    return value;
  }

  std::string ParseString() {
    ++pos_;  // opening quote
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) Fail("unterminated string");
      char c = text_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (pos_ >= text_.size()) Fail("dangling escape");
        char next = text_[pos_++];
        if (next != '"' && next != '\\') Fail("bad escape");
        c = next;
      }
      out.push_back(c);
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string ItemText(const JobItem& item) {
  if (const auto* n = std::get_if<std::int64_t>(&item)) return std::to_string(*n);
  return std::get<std::string>(item);
}

std::int64_t CheckedAdd(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) {
    throw Error(ErrorCode::kEvalError, "integer overflow in sum");
  }
  return out;
}

}  // namespace

std::string_view OpName(JobOp op) {
  switch (op) {
    case JobOp::kSum: return "sum";
    case JobOp::kMin: return "min";
    case JobOp::kMax: return "max";
    case JobOp::kConcat: return "concat";
  }
  return "?";
}

JobExpr ParseJob(std::string_view text) { return Parser(text).Parse(); }

std::string FormatJob(const JobExpr& job) {
  std::string out(OpName(job.op));
  out.push_back('[');
  for (std::size_t i = 0; i < job.items.size(); ++i) {
    if (i > 0) out.push_back(',');
    if (const auto* n = std::get_if<std::int64_t>(&job.items[i])) {
      out += std::to_string(*n);
    } else {
      out.push_back('"');
      for (char c : std::get<std::string>(job.items[i])) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
      }
      out.push_back('"');
    }
  }
  out.push_back(']');
  return out;
}

std::optional<JobValue> EvaluatePartial(const JobExpr& job) {
  switch (job.op) {
    case JobOp::kSum: {
      std::int64_t total = 0;
      for (const auto& item : job.items) {
        total = CheckedAdd(total, std::get<std::int64_t>(item));
      }
      return total;
    }
    case JobOp::kMin:
    case JobOp::kMax: {
      if (job.items.empty()) return std::nullopt;
      std::int64_t best = std::get<std::int64_t>(job.items.front());
      for (const auto& item : job.items) {
        std::int64_t v = std::get<std::int64_t>(item);
        best = job.op == JobOp::kMin ? std::min(best, v) : std::max(best, v);
      }
      return best;
    }
    case JobOp::kConcat: {
      std::string out;
      for (const auto& item : job.items) out += ItemText(item);
      return out;
    }
  }
  throw Error(ErrorCode::kEvalError, "unknown operation");
}

JobValue Evaluate(const JobExpr& job) {
  auto value = EvaluatePartial(job);
  if (!value) {
    throw Error(ErrorCode::kEvalError,
                std::string(OpName(job.op)) + " of an empty list");
  }
  return *value;
}

std::optional<JobValue> Combine(JobOp op,
                                std::span<const std::optional<JobValue>> parts) {
  std::optional<JobValue> acc;
  if (op == JobOp::kSum) acc = std::int64_t{0};
  if (op == JobOp::kConcat) acc = std::string();
  for (const auto& part : parts) {
    if (!part) continue;
    if (!acc) {
      acc = part;
      continue;
    }
    switch (op) {
      case JobOp::kSum:
        acc = CheckedAdd(std::get<std::int64_t>(*acc),
                         std::get<std::int64_t>(*part));
        break;
      case JobOp::kMin:
        acc = std::min(std::get<std::int64_t>(*acc),
                       std::get<std::int64_t>(*part));
        break;
      case JobOp::kMax:
        acc = std::max(std::get<std::int64_t>(*acc),
                       std::get<std::int64_t>(*part));
        break;
      case JobOp::kConcat:
        acc = std::get<std::string>(*acc) + std::get<std::string>(*part);
        break;
    }
  }
  return acc;
}

std::string FormatValue(const std::optional<JobValue>& value) {
  if (!value) return "none";
  if (const auto* n = std::get_if<std::int64_t>(&*value)) {
    return "i:" + std::to_string(*n);
  }
  return "s:" + std::get<std::string>(*value);
}

std::optional<JobValue> ParseValue(std::string_view text) {
  if (text == "none") return std::nullopt;
  if (text.starts_with("s:")) return std::string(text.substr(2));
  if (text.starts_with("i:")) {
    std::int64_t v = 0;
    auto body = text.substr(2);
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (ec == std::errc() && ptr == body.data() + body.size()) return v;
  }
  throw Error(ErrorCode::kCorrupt, "bad job value '" + std::string(text) + "'");
}

}  // namespace anoncloud::compute
