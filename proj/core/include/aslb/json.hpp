#pragma once

#include <nlohmann/json.hpp>

#include "aslb/coholder.hpp"
#include "aslb/covering.hpp"
#include "aslb/folding.hpp"
#include "aslb/funcspace.hpp"
#include "aslb/packing.hpp"
#include "aslb/stats.hpp"

namespace aslb {

/// Insertion-ordered so reports serialize byte-identically run to run.
using json = nlohmann::ordered_json;

void to_json(json& j, const FunctionMeta& m);
void from_json(const json& j, FunctionMeta& m);
void to_json(json& j, const HolderWitness& w);
void from_json(const json& j, HolderWitness& w);
void to_json(json& j, const EnergyResult& r);
void to_json(json& j, const LineFit& f);

void to_json(json& j, const Square& q);
void from_json(const json& j, Square& q);
void to_json(json& j, const CoverReport& r);
void to_json(json& j, const BoxDimensionResult& r);
void to_json(json& j, const SpectrumEvidence& e);
void to_json(json& j, const SpectrumPoint& p);
void to_json(json& j, const Regularity& r);
void to_json(json& j, const AuditRow& r);
void to_json(json& j, const UpperBoundAudit& a);
void to_json(json& j, const RotationCheck& c);

void to_json(json& j, const FoldSquare& q);
void to_json(json& j, const FoldPlan& p);
void from_json(const json& j, FoldPlan& p);
void to_json(json& j, const FoldInvariants& i);
void to_json(json& j, const WitnessCheck& c);
void to_json(json& j, const HolderCheck& c);
void to_json(json& j, const ColumnCheck& c);
void to_json(json& j, const FoldVerification& v);

void to_json(json& j, const Interval& i);
void from_json(const json& j, Interval& i);
void to_json(json& j, const LowerOscillation& l);
void to_json(json& j, const CoHolderParams& p);
void from_json(const json& j, CoHolderParams& p);
void to_json(json& j, const CertifiedSquare& s);
void from_json(const json& j, CertifiedSquare& s);
void to_json(json& j, const CoHolderCertificate& c);
void from_json(const json& j, CoHolderCertificate& c);
void to_json(json& j, const SquareDeviation& d);
void to_json(json& j, const DeviationReport& d);
void to_json(json& j, const CertificateAudit& a);

/// Parameters, M(m) and construction log; the points go to CSV.
void to_json(json& j, const PackingSet& p);
void to_json(json& j, const PackingAudit& a);
void to_json(json& j, const PackingTrend& t);
void to_json(json& j, const BorderlineParams& p);
void to_json(json& j, const RatioCheck& r);

/// Non-finite doubles become strings ("inf", "-inf", "nan") instead of null.
json number(double v);

}  // namespace aslb
