#include "forge/bundled.hpp"

#include <sstream>

namespace forge {

namespace {

struct BundledSpec {
  const char* id;
  const char* question;
  int reference;
  const char* gold_text;
  const char* aux_text;
  const char* extra_text;
};

constexpr BundledSpec kSuite[] = {
    {"t01", "How many arches does the Riverton Bridge have?", 7,
     "The Riverton Bridge carries the old coach road across the Lerr "
     "estuary on 7 arches, a count confirmed by the county survey office.",
     "Masons repointed the Riverton Bridge arches last spring after frost "
     "damage loosened mortar along the upstream faces.",
     "Toll records for the Riverton crossing mention grain carts, drovers, "
     "and the bridge keeper's cottage by the estuary path."},
    {"t02", "How many turbines does the Calder Valley Power Station operate?",
     12,
     "The Calder Valley Power Station operates 12 turbines across its two "
     "halls, according to the grid commissioning ledger.",
     "Engineers at the Calder Valley Power Station overhaul each turbine "
     "hall on a rolling maintenance rota through the winter months.",
     "The Calder valley transmission corridor follows the river terrace "
     "past the station's cooling ponds and switchyard fencing."},
    {"t03", "How many galleries does the Marlowe Museum contain?", 5,
     "The Marlowe Museum contains 5 galleries in its restored wing, as "
     "listed in the curatorial handbook.",
     "Visitors to the Marlowe Museum praise the gallery lighting and the "
     "quiet reading alcoves near the atrium stair.",
     "The Marlowe estate archive holds acquisition letters, loan deeds, "
     "and conservation notes for the museum trustees."},
    {"t04", "How many platforms does Harrowgate Junction serve?", 9,
     "Harrowgate Junction serves 9 platforms following the station "
     "rebuild, per the signalling diagram held by the operator.",
     "Porters at Harrowgate Junction guide passengers between platforms "
     "using the covered footbridge beside the clock tower.",
     "Timetable reform at Harrowgate shortened dwell times and moved the "
     "parcels dock away from the junction concourse."},
    {"t05", "How many observation decks does the Auric Spire include?", 4,
     "The Auric Spire includes 4 observation decks above the atrium, "
     "according to the building safety certificate.",
     "Window crews at the Auric Spire abseil past each observation deck "
     "during the quarterly facade inspection.",
     "Lift modernisation at the Auric tower replaced hoist ropes and "
     "refreshed the spire's lobby finishes."},
    {"t06", "How many berths does the Port of Selwick provide?", 15,
     "The Port of Selwick provides 15 berths along its tidal quay, as "
     "recorded in the harbourmaster's register.",
     "Pilots working the Port of Selwick schedule berth movements around "
     "the tide tables posted at the harbour office.",
     "Selwick's fish market opens before dawn, and the port chandlers "
     "stock rope, chain, and navigation lamps."},
    {"t07", "How many reading rooms does the Aldgate Library offer?", 6,
     "The Aldgate Library offers 6 reading rooms across its main floors, "
     "as stated in the borrowing guide.",
     "Librarians at the Aldgate Library reshelve the reading room returns "
     "each evening after the study desks clear.",
     "The Aldgate bequest funded map cabinets, newspaper racks, and the "
     "library's restored entrance hall."},
    {"t08", "How many glasshouses does the Breckland Botanic Garden maintain?",
     11,
     "The Breckland Botanic Garden maintains 11 glasshouses along the "
     "south walk, per the horticultural inventory.",
     "Gardeners at the Breckland Botanic Garden ventilate each glasshouse "
     "at dawn to hold the orchid benches at temperature.",
     "Breckland's seed exchange catalogues alpine cuttings, fern spores, "
     "and the garden's heritage apple stock."},
    {"t09", "How many stage lifts does the Veldt Amphitheatre use?", 3,
     "The Veldt Amphitheatre uses 3 stage lifts beneath the orchestra "
     "floor, as noted in the rigging manual.",
     "Stagehands at the Veldt Amphitheatre cycle the lifts during the "
     "morning line check before rehearsals begin.",
     "Acoustic panels around the Veldt stage soften reflections from the "
     "amphitheatre's curved stone seating."},
    {"t10", "How many laboratories does the Polaris Institute run?", 8,
     "The Polaris Institute runs 8 laboratories on its research campus, "
     "according to the facilities directory.",
     "Technicians at the Polaris Institute calibrate laboratory balances "
     "and log the cold room temperatures nightly.",
     "The Polaris lecture programme covers glaciology, magnetometry, and "
     "the institute's long polar survey series."},
    {"t11", "How many granaries does the Merrow Delta Cooperative manage?",
     14,
     "The Merrow Delta Cooperative manages 14 granaries across the "
     "floodplain villages, per the harvest ledger.",
     "Members of the Merrow Delta Cooperative rotate granary inspections "
     "after each barge delivery from the delta farms.",
     "Levee repairs along the Merrow delta kept the cooperative's drying "
     "floors dry through the autumn rains."},
    {"t12", "How many viaducts does the Northfell Railway cross?", 10,
     "The Northfell Railway crosses 10 viaducts on its moorland section, "
     "as charted in the route gradient profile.",
     "Track gangs on the Northfell Railway walk each viaduct parapet "
     "after winter storms loosen the coping stones.",
     "Excursion trains on the Northfell line pause at the summit halt for "
     "photographs across the moor."},
};

}  // namespace

std::string_view bundled_instruction() {
  return "Answer the question using the provided context. Reply with the "
         "final number only.";
}

TaskSet bundled_tasks() {
  TaskSet set;
  for (const BundledSpec& spec : kSuite) {
    Task task;
    task.id = spec.id;
    task.question = spec.question;
    task.instruction = std::string(bundled_instruction());
    task.gold_answer = spec.reference;
    task.reference_claim = static_cast<double>(spec.reference);
    set.tasks.push_back(std::move(task));
  }
  return set;
}

Corpus bundled_corpus() {
  std::vector<Document> docs;
  for (const BundledSpec& spec : kSuite) {
    Document gold;
    gold.id = std::string(spec.id) + "-gold";
    gold.text = spec.gold_text;
    docs.push_back(std::move(gold));

    Document aux;
    aux.id = std::string(spec.id) + "-aux";
    aux.text = spec.aux_text;
    docs.push_back(std::move(aux));

    Document extra;
    extra.id = std::string(spec.id) + "-extra";
    extra.text = spec.extra_text;
    docs.push_back(std::move(extra));
  }
  return Corpus(std::move(docs));
}

}  // namespace forge
