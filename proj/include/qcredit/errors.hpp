#pragma once

#include <stdexcept>
#include <string>

namespace qcredit {

// Root of every error the library raises on purpose.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (wrong lengths, bad options).
class ContractError : public Error {
public:
  using Error::Error;
};

class IndexError : public ContractError {
public:
  using ContractError::ContractError;
};

class SizeError : public ContractError {
public:
  using ContractError::ContractError;
};

// Parameter-shift is only exact for single Pauli-rotation generators.
class UnsupportedGeneratorError : public ContractError {
public:
  using ContractError::ContractError;
};

// Input data cannot support the requested computation (e.g. one class only).
class DegenerateDataError : public Error {
public:
  using Error::Error;
};

// Malformed external input (CSV, JSON config).
class ParseError : public Error {
public:
  using Error::Error;
};

} // namespace qcredit
