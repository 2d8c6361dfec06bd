#pragma once

// JSON and CSV renderings of verdicts, profiles and certificates. Objects are
// key-sorted and doubles print in shortest round-trip form, so equal inputs
// give byte-identical text.

#include "qilab/asymptotics.hpp"
#include "qilab/dsl.hpp"
#include "qilab/group_ops.hpp"
#include "qilab/qi_certifier.hpp"
#include "qilab/topology.hpp"
#include "qilab/verdict.hpp"

#include <string>

namespace qilab {

Json profile_to_json(const RatioProfile& profile);
/// radius,sup_ratio,inf_ratio header plus one row per entry.
std::string profile_to_csv(const RatioProfile& profile);

Json verdict_to_json(const Verdict& verdict);
Json qi_certificate_to_json(const QICertificate& cert);
Json halpha_certificate_to_json(const HAlphaCertificate& cert);
Json torsion_to_json(const TorsionResult& result);
Json witness_sequence_to_json(const WitnessResult& result);
Json gadget_to_json(const GadgetResult& gadget);
Json density_to_json(const DensityReport& report);
Json refine_to_json(const RefineResult& result);

/// Pretty-printed with a trailing newline.
std::string dump_report(const Json& report);

}  // namespace qilab
