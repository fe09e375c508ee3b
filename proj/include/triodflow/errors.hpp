#ifndef TRIODFLOW_ERRORS_HPP
#define TRIODFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace triodflow {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RootNotConverged : Error { using Error::Error; };
struct InvalidPins : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct TopologyMismatch : Error { using Error::Error; };
struct WrongTopology : Error { using Error::Error; };
struct RunAborted : Error { using Error::Error; };
struct GeometryTooSlack : Error { using Error::Error; };
struct OracleNotConverged : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

} // namespace triodflow

#endif
