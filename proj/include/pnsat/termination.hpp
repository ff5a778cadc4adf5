#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace pnsat {

/// Token-based termination detection over a ring of workstations 0..N-1.
///
/// Each workstation keeps a colour and the balance of messages it sent
/// minus messages it received. A token starts at workstation 0 and is only
/// passed on by a passive workstation, which adds its balance to the token,
/// blackens the token if it is itself black, and turns white. A round that
/// returns to workstation 0 white, with a zero total and workstation 0 white
/// and passive, is clean; two clean rounds in a row declare termination.
class TokenDetector {
 public:
  explicit TokenDetector(std::uint32_t n);

  void on_send(std::uint32_t w);
  void on_receive(std::uint32_t w);

  /// Moves the token as far as passive workstations allow (bounded by a few
  /// rounds per call). Returns true once termination is declared.
  bool advance(const std::function<bool(std::uint32_t)>& passive);

  bool terminated() const { return terminated_; }
  std::uint64_t rounds() const { return rounds_; }
  std::uint32_t holder() const { return holder_; }

 private:
  std::uint32_t n_;
  std::vector<char> black_;
  std::vector<std::int64_t> balance_;
  std::uint32_t holder_ = 0;
  bool token_black_ = false;
  std::int64_t token_count_ = 0;
  int clean_rounds_ = 0;
  std::uint64_t rounds_ = 0;
  bool terminated_ = false;
};

}  // namespace pnsat
