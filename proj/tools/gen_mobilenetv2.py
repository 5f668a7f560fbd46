#!/usr/bin/env python3
# Copyright 2026 The depthcomp Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

# Writes the MobileNetV2-1.0 convolutional backbone as a network description.
import json
import sys


def conv(cin, cout, k, stride=1, groups=1, act="relu6"):
    return {"in": cin, "out": cout, "k": k, "stride": stride, "pad": (k - 1) // 2,
            "groups": groups, "bias": False, "bn": {"eps": 1e-5}, "act": act}


def main(path):
    layers = [conv(3, 32, 3, stride=2),
              conv(32, 32, 3, groups=32),
              conv(32, 16, 1, act="id")]
    skips = []
    cin = 16
    for t, c, n, s in [(6, 24, 2, 2), (6, 32, 3, 2), (6, 64, 4, 2), (6, 96, 3, 1),
                       (6, 160, 3, 2), (6, 320, 1, 1)]:
        for r in range(n):
            stride = s if r == 0 else 1
            start = len(layers)
            hidden = cin * t
            layers.append(conv(cin, hidden, 1))
            layers.append(conv(hidden, hidden, 3, stride=stride, groups=hidden))
            layers.append(conv(hidden, c, 1, act="id"))
            if stride == 1 and cin == c:
                skips.append({"start": start, "end": len(layers)})
            cin = c
    # Last activation is identity by convention; the head is not modelled.
    layers.append(conv(320, 1280, 1, act="id"))
    doc = {"input": {"channels": 3, "height": 224, "width": 224}, "layers": layers, "skips": skips}
    with open(path, "w") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/mobilenetv2_1.0.json")
