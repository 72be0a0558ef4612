#pragma once

// Finite words over the alphabet {1, ..., k} and breadth-first enumeration
// of the word tree.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "ifslab/errors.hpp"

namespace ifslab {

/// A finite word w = (w_1 ... w_n). As a map it applies w_1 first and w_n
/// last; the empty word is the identity.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<int> letters) : letters_(letters) {}
  explicit Word(std::vector<int> letters) : letters_(std::move(letters)) {}

  [[nodiscard]] const std::vector<int>& letters() const noexcept { return letters_; }
  [[nodiscard]] std::size_t size() const noexcept { return letters_.size(); }
  [[nodiscard]] bool empty() const noexcept { return letters_.empty(); }
  [[nodiscard]] int operator[](std::size_t i) const { return letters_[i]; }
  [[nodiscard]] auto begin() const noexcept { return letters_.begin(); }
  [[nodiscard]] auto end() const noexcept { return letters_.end(); }

  void push_back(int letter) { letters_.push_back(letter); }

  [[nodiscard]] Word reversed() const { return Word(std::vector<int>(letters_.rbegin(), letters_.rend())); }

  /// Throws InvalidInput unless every letter lies in [1, k].
  void check_alphabet(int k) const {
    for (int l : letters_) {
      if (l < 1 || l > k)
        throw InvalidInput("word letter " + std::to_string(l) + " outside alphabet 1.." +
                           std::to_string(k));
    }
  }

  [[nodiscard]] std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < letters_.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(letters_[i]);
    }
    return s + ")";
  }

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;

 private:
  std::vector<int> letters_;
};

/// Letters of u followed by letters of v: applying the result is applying u,
/// then v.
inline Word concat(const Word& u, const Word& v) {
  std::vector<int> out(u.letters());
  out.insert(out.end(), v.begin(), v.end());
  return Word(std::move(out));
}

inline Word operator+(const Word& u, const Word& v) { return concat(u, v); }

/// Repeats `letter` n times.
inline Word power(int letter, std::size_t n) { return Word(std::vector<int>(n, letter)); }

/// Breadth-first word stream: length ascending, lexicographic within a
/// length, stopping after max_len or `budget` words, whichever first.
class WordEnumerator {
 public:
  WordEnumerator(int k, int max_len, std::int64_t budget = -1)
      : k_(k), max_len_(max_len), budget_(budget) {
    if (k < 1) throw InvalidInput("alphabet size must be >= 1");
    if (max_len < 0) throw InvalidInput("max_len must be >= 0");
  }

  std::optional<Word> next() {
    if (done_ || (budget_ >= 0 && emitted_ >= budget_)) return std::nullopt;
    Word out(current_);
    ++emitted_;
    advance();
    return out;
  }

 private:
  void advance() {
    // Odometer increment; on overflow move to the next length.
    for (std::size_t i = current_.size(); i-- > 0;) {
      if (current_[i] < k_) {
        ++current_[i];
        return;
      }
      current_[i] = 1;
    }
    if (static_cast<int>(current_.size()) >= max_len_) {
      done_ = true;
      return;
    }
    current_.assign(current_.size() + 1, 1);
  }

  int k_;
  int max_len_;
  std::int64_t budget_;
  std::int64_t emitted_ = 0;
  bool done_ = false;
  std::vector<int> current_;
};

inline std::vector<Word> enumerate_words(int k, int max_len, std::int64_t budget = -1) {
  std::vector<Word> out;
  WordEnumerator e(k, max_len, budget);
  while (auto w = e.next()) out.push_back(std::move(*w));
  return out;
}

}  // namespace ifslab
