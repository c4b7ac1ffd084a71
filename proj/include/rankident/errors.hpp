#pragma once

#include <stdexcept>
#include <string>

namespace rankident {

// Malformed or inconsistent input (files, constructor arguments).
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

// A computation could not be carried out (budget exceeded, no convergence).
class compute_error : public std::runtime_error {
public:
    explicit compute_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rankident
