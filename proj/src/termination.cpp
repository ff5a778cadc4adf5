#include "pnsat/termination.hpp"

#include <stdexcept>

namespace pnsat {

TokenDetector::TokenDetector(std::uint32_t n) : n_(n), black_(n, 1), balance_(n, 0) {
  if (n == 0) throw std::invalid_argument("token ring needs at least one workstation");
}

void TokenDetector::on_send(std::uint32_t w) {
  ++balance_[w];
  black_[w] = 1;
}

void TokenDetector::on_receive(std::uint32_t w) {
  --balance_[w];
  black_[w] = 1;
}

bool TokenDetector::advance(const std::function<bool(std::uint32_t)>& passive) {
  if (terminated_) return true;
  const std::uint64_t budget = 4ull * n_ + 2;
  for (std::uint64_t hop = 0; hop < budget; ++hop) {
    if (!passive(holder_)) return false;
    if (holder_ == 0 && hop > 0) {
      // Round complete: the token has visited every other workstation.
      ++rounds_;
      const bool clean = !token_black_ && !black_[0] && token_count_ + balance_[0] == 0;
      clean_rounds_ = clean ? clean_rounds_ + 1 : 0;
      if (clean_rounds_ >= 2) return terminated_ = true;
    }
    if (holder_ == 0) {
      token_black_ = false;
      token_count_ = 0;
      black_[0] = 0;
    } else {
      token_count_ += balance_[holder_];
      if (black_[holder_]) token_black_ = true;
      black_[holder_] = 0;
    }
    holder_ = (holder_ + 1) % n_;
  }
  return false;
}

}  // namespace pnsat
