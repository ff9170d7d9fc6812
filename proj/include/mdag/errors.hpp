#pragma once

#include <stdexcept>
#include <string>

namespace mdag {

// Raised when a conditional probability would divide by a zero-mass event.
// Carries the rendered term and the event so callers can report which part
// of a functional failed.
class positivity_error : public std::runtime_error {
public:
    positivity_error(std::string term, std::string event)
        : std::runtime_error("positivity violation in " + term + ": event {" + event +
                             "} has zero probability"),
          term_(std::move(term)),
          event_(std::move(event)) {}

    const std::string& term() const { return term_; }
    const std::string& event() const { return event_; }

private:
    std::string term_;
    std::string event_;
};

// Raised when an exact-enumeration request exceeds the configured cap.
class enumeration_cap_error : public std::runtime_error {
public:
    explicit enumeration_cap_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mdag
