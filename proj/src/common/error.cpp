#include "qgen/common/error.hpp"

namespace qgen {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::not_found: return "not_found";
    case ErrorKind::conflict: return "conflict";
    case ErrorKind::io: return "io";
    case ErrorKind::backend: return "backend";
    case ErrorKind::alignment: return "alignment";
  }
  return "unknown";
}

}  // namespace qgen
