#ifndef EDGECACHE_ERROR_H_
#define EDGECACHE_ERROR_H_

#include <stdexcept>
#include <string>

namespace edgecache {

// Invalid model input: bad demand parameters, inconsistent policies, etc.
class ModelError : public std::invalid_argument {
 public:
  explicit ModelError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed or inconsistent configuration document. The CLI maps this to
// exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace edgecache

#endif  // EDGECACHE_ERROR_H_
