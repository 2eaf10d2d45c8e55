#pragma once

#include <stdexcept>
#include <string>

namespace kcv {

// Error categories mirrored one-to-one by the C API status codes.
enum class errc {
    invalid_argument,
    domain,       // input outside the mathematical domain of an operation
    range,        // time outside a profile horizon, index out of bounds
    numeric,      // quadrature/integration failed to reach tolerance
    positivity,   // density matrix left the physical cone during integration
    conditioning, // result would be dominated by amplified noise (|S| too small)
    invariant,    // a checked identity/inequality failed beyond tolerance
    parse,        // config text rejected
    io,           // filesystem failure
};

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

} // namespace kcv
