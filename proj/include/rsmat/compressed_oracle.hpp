#pragma once
// Oracles backed by compressed matrices, so compressed outputs can be fed
// back in as compression inputs.

#include <memory>

#include "rsmat/hbs.hpp"
#include "rsmat/hodlr.hpp"
#include "rsmat/oracle.hpp"
#include "rsmat/serialize.hpp"

namespace rsmat {

OraclePtr compressed_oracle(std::shared_ptr<const HodlrMatrix> h, Exec exec = Exec::parallel);
OraclePtr compressed_oracle(std::shared_ptr<const HbsMatrix> h, Exec exec = Exec::parallel);
OraclePtr compressed_oracle(std::shared_ptr<const HbsIdMatrix> h, Exec exec = Exec::parallel);
OraclePtr compressed_oracle(std::shared_ptr<const CompressedMatrix> m, Exec exec = Exec::parallel);

}  // namespace rsmat
