#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mwd {

// Error categories map onto CLI exit codes.
enum class ErrorKind {
  InvalidArgument = 2,
  Io = 3,
  Format = 4,
  Undefined = 5,
  Internal = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

const char* to_string(ErrorKind kind);

inline Error invalid_argument(const std::string& what) { return Error(ErrorKind::InvalidArgument, what); }
inline Error io_error(const std::string& what) { return Error(ErrorKind::Io, what); }
inline Error format_error(const std::string& what) { return Error(ErrorKind::Format, what); }

using Series = std::vector<double>;

// Binary class label. MW is the positive class everywhere (metrics, AUC scores).
enum class Label : int { NonMW = 0, MW = 1 };

inline int to_int(Label l) { return static_cast<int>(l); }

// Counter-based seed derivation (SplitMix64 finalizer). Used so that per-tree,
// per-fold and per-subject random streams do not depend on scheduling.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Resolves a requested thread count; 0 means hardware concurrency.
unsigned resolve_threads(unsigned requested);

// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items must write
// to disjoint outputs; the first exception thrown by any item is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

double mean(std::span<const double> x);
// Sample standard deviation (n - 1 denominator).
double sample_sd(std::span<const double> x);
// Population standard deviation (n denominator).
double population_sd(std::span<const double> x);

}  // namespace mwd
