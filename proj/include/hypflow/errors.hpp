#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hypflow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A triangulation failed validation. `index()` is the offending face or
/// edge (see `what()` for which), or npos for global failures.
class MalformedMesh : public Error
{
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    MalformedMesh(const std::string& msg, std::size_t index = npos)
        : Error(msg), index_(index)
    {
    }
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class InvalidBoundaryIndex : public Error
{
public:
    using Error::Error;
};

/// Overflow or NaN inside a numerical kernel. Never clamped.
class NonFinite : public Error
{
public:
    using Error::Error;
};

/// Some edge has admissibility margin <= 0.
class InadmissibleFactor : public Error
{
public:
    InadmissibleFactor(const std::string& msg, std::size_t edge)
        : Error(msg), edge_(edge)
    {
    }
    std::size_t edge() const noexcept { return edge_; }

private:
    std::size_t edge_;
};

class EigSolveFailure : public Error
{
public:
    using Error::Error;
};

class QuadratureStall : public Error
{
public:
    using Error::Error;
};

class MaxIterations : public Error
{
public:
    using Error::Error;
};

class LineSearchFailure : public Error
{
public:
    using Error::Error;
};

class InsufficientData : public Error
{
public:
    using Error::Error;
};

/// Input text (mesh, metric, targets) could not be parsed.
class ParseError : public Error
{
public:
    using Error::Error;
};

}  // namespace hypflow
