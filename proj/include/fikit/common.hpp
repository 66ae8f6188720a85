#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fikit {

// Domain-specific failures that callers are expected to distinguish.
struct MetricUndefinedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainTruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CertificationFailureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UndefinedEntropyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AbsoluteContinuityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoInformationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// FNV-1a content hash used to stamp reports with a digest of their inputs.
class Digest {
public:
    Digest& bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            state_ ^= p[i];
            state_ *= 0x100000001b3ULL;
        }
        return *this;
    }
    Digest& add(double v) { return bytes(&v, sizeof v); }
    Digest& add(std::int64_t v) { return bytes(&v, sizeof v); }
    Digest& add(int v) { return add(static_cast<std::int64_t>(v)); }
    Digest& add(std::size_t v) { return add(static_cast<std::int64_t>(v)); }
    Digest& add(const std::string& s) { return bytes(s.data(), s.size()); }
    Digest& add(const std::vector<double>& v) {
        for (double x : v) add(x);
        return *this;
    }
    std::uint64_t value() const { return state_; }
    std::string hex() const;

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace fikit
