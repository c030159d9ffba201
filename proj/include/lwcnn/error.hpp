#pragma once

#include <stdexcept>
#include <string>

namespace lwcnn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor or operator shapes disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

// Caller violated an operator precondition that is not a plain shape mismatch.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Structural problem in a ModelGraph; the message names the offending layer.
class GraphError : public Error {
 public:
  using Error::Error;
};

// Named tensor missing or mis-shaped in a weight store or model file.
class LookupError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lwcnn
