#pragma once

#include "pbl/blr.hpp"
#include "pbl/bounds.hpp"
#include "pbl/mc_oracle.hpp"
#include "pbl/selection.hpp"
#include "pbl/subgamma.hpp"

#include <json.hpp>

#include <iosfwd>

namespace pbl {

nlohmann::json to_json(const EvidenceReport& r);
nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const SelectionReport& r);
nlohmann::json to_json(const CoverageReport& r);
nlohmann::json to_json(const LinearTaskSpec& t);
nlohmann::json to_json(const MgfReport& r);

/// Columns `lambda,psi_hat,envelope,band`.
void write_mgf_csv(std::ostream& out, const MgfReport& r);

}  // namespace pbl
