#include "calr/errors.hpp"

namespace calr {

ModeSingularity::ModeSingularity(int degree, double condition, const std::string& detail)
    : std::runtime_error(detail), degree_(degree), condition_(condition) {}

}  // namespace calr
