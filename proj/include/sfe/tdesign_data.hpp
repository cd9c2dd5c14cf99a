/*
Copyright 2026 The sfe Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

// Generated by tools/gen_tdesign_header.py. Do not edit.
#pragma once

#include <array>
#include <span>

namespace sfe::detail {

inline constexpr double kDesign2[][3] = {
    {0.57735026918962584, 0.57735026918962584, 0.57735026918962584},
    {0.57735026918962584, -0.57735026918962584, -0.57735026918962584},
    {-0.57735026918962584, 0.57735026918962584, -0.57735026918962584},
    {-0.57735026918962584, -0.57735026918962584, 0.57735026918962584},
};

inline constexpr double kDesign3[][3] = {
    {1, 0, 0},
    {-1, 0, 0},
    {0, 1, 0},
    {0, -1, 0},
    {0, 0, 1},
    {0, 0, -1},
};

inline constexpr double kDesign5[][3] = {
    {0, 0.52573111211913359, 0.85065080835203999},
    {0, 0.52573111211913359, -0.85065080835203999},
    {0, -0.52573111211913359, 0.85065080835203999},
    {0, -0.52573111211913359, -0.85065080835203999},
    {0.52573111211913359, 0.85065080835203999, 0},
    {0.52573111211913359, -0.85065080835203999, 0},
    {-0.52573111211913359, 0.85065080835203999, 0},
    {-0.52573111211913359, -0.85065080835203999, 0},
    {0.85065080835203999, 0, 0.52573111211913359},
    {-0.85065080835203999, 0, 0.52573111211913359},
    {0.85065080835203999, 0, -0.52573111211913359},
    {-0.85065080835203999, 0, -0.52573111211913359},
};

inline constexpr double kDesign7[][3] = {
    {0, 0, 1},
    {0.52402565495697595, 0, 0.85170247912455466},
    {0.27034950746430281, -0.3670618622799991, 0.89004310742421222},
    {0.23605571222747648, 0.36663842678609992, 0.89991886563655976},
    {0.69813479643423904, -0.32290192799132861, 0.63901654979132305},
    {-0.23209998132581308, -0.3255077639043254, 0.91661021939893472},
    {0.57919150042818279, 0.46932881388840064, 0.66653407286188848},
    {0.38527995887337829, -0.72054061153298021, 0.57652457052775019},
    {-0.2115164938503436, 0.43478883760819237, 0.87533961381887349},
    {0.85855817304796089, 0.060519610468364092, 0.5091318495648306},
    {-0.41732268591609956, -0.67903524407778015, 0.60394777350363849},
    {0.20925073796469831, 0.74076846697836363, 0.63833863034580185},
    {0.69741474730907405, -0.65642005740995901, 0.28762019829234275},
    {-0.49857923576678748, 0.024373518934022016, 0.86650140059724023},
    {0.83687314984905126, 0.45847125597351496, 0.29907764628570171},
    {-0.0087981219056319695, -0.70397878917464218, 0.71016649980348867},
    {-0.18758877515292877, 0.81181196363481967, 0.55296635262554839},
    {0.93990837909252023, -0.29604168959910487, 0.17009278917984277},
    {-0.7009443618722323, -0.32034561585101329, 0.63722499006596089},
    {0.55577935306805049, 0.79129271782285349, 0.25488261106592058},
    {0.36240540911264818, -0.91626585996548149, 0.17064346840008504},
    {-0.56648920446237827, 0.42861717264686522, 0.70383044871601652},
    {0.99330267819803186, 0.10425735664306475, 0.049801536827872896},
    {-0.14644210479840869, -0.93253997294804136, 0.33003622346081662},
    {0.1223179335750481, 0.9634536781182218, 0.2383177149235868},
    {0.75573532707625546, -0.63641266926957163, -0.15441188361691641},
    {-0.86249338353975102, -0.0023131020694856829, 0.50606305230570636},
    {0.77433360642036464, 0.62036430828297751, -0.12472205489252799},
    {0.022034677635350188, -0.99843073943358529, -0.051483313176314049},
    {-0.56754076503489626, 0.74300605434549438, 0.35473861254386302},
    {0.93054137259068836, -0.20381142304736397, -0.3042263264946779},
    {-0.68278780268922312, -0.67395043743054095, 0.28211987591448628},
    {0.39605086283273022, 0.90664441148509822, -0.14539472195471795},
    {0.38551774240621334, -0.86420190141352993, -0.3233127648009837},
    {-0.85313965071577624, 0.40990976324370088, 0.32268672481844757},
    {0.88662021938899616, 0.26103547109484349, -0.38179191898323539},
    {-0.42398884093415534, -0.9046774932915651, -0.042333153615125581},
    {-0.3060737105420876, 0.95063286961642635, 0.051147149674610135},
    {0.67148691348453193, -0.52181288985025076, -0.52613366458072863},
    {-0.94226519822511445, -0.29804659479493018, 0.15265819186972138},
    {0.62680210456044894, 0.54271722452765159, -0.55908598258192355},
    {-0.054833178020810391, -0.86584826602902187, -0.4972927737285896},
    {-0.75903705478932026, 0.647078585029636, -0.071777811702494712},
    {0.72417150240121397, 0.034482381944549514, -0.68875728703615091},
    {-0.7762629945318682, -0.61236519014067381, -0.14974858004132535},
    {-0.088927925038597991, 0.9613455974815972, -0.26058869190945411},
    {0.22560819889870726, -0.64980347737074839, -0.72584873175239806},
    {-0.98961281597879514, 0.14351504369110657, 0.0083610217592862291},
    {0.2462060936628101, 0.51131718145111005, -0.82336947927172544},
    {-0.49518358598565582, -0.73576050458966458, -0.46200616452202098},
    {-0.48929430389743184, 0.77730860595110396, -0.39545216561283236},
    {0.46165535450658435, -0.28419377009991154, -0.84030246619404769},
    {-0.94764183763595444, -0.1415464162335601, -0.28625086831900964},
    {0.25374193791888056, 0.8117843430271745, -0.52594791506109217},
    {-0.25761128644196285, -0.54820265879263341, -0.79568226698249633},
    {-0.8296065954523949, 0.41010741110406779, -0.37889946970061283},
    {0.35187161210098455, 0.12232612345321543, -0.92802084465725387},
    {-0.70592350282985794, -0.36648248378542936, -0.60610444416031639},
    {-0.19740646235552944, 0.67406286276329763, -0.71180752009487991},
    {-0.0030179966262554336, -0.2412011958336219, -0.9704704399541465},
    {-0.756316353385037, 0.055565688161182548, -0.65184202679908121},
    {-0.11782238471137077, 0.243283355597539, -0.96277260791431285},
    {-0.39898723404580211, -0.10147150549473713, -0.9113247064801393},
    {-0.50566938902812752, 0.41036301195092639, -0.75888119453738212},
};

struct DesignEntry {
  int t;
  std::span<const double[3]> points;
};

inline constexpr std::array<DesignEntry, 4> kDesigns = {{
    {2, std::span<const double[3]>(kDesign2, 4)},
    {3, std::span<const double[3]>(kDesign3, 6)},
    {5, std::span<const double[3]>(kDesign5, 12)},
    {7, std::span<const double[3]>(kDesign7, 64)},
}};

}  // namespace sfe::detail
