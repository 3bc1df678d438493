#include "treelab/errors.hpp"

namespace treelab {

void fail(std::string code, const std::string& message) {
    throw Error(std::move(code), message);
}

}  // namespace treelab
