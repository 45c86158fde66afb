// Very coarse continent outlines (lon, lat pairs) for the offline map
// background; enough to orient the stance points without any tile service.

export type Ring = [number, number][];

export const WORLD_OUTLINE: Ring[] = [
  // Americas
  [[-168, 66], [-140, 60], [-125, 49], [-97, 26], [-84, 10], [-77, 7],
   [-70, -18], [-71, -45], [-68, -55], [-58, -34], [-35, -8], [-50, 0],
   [-61, 10], [-75, 10], [-97, 26], [-82, 31], [-65, 47], [-80, 55],
   [-95, 60], [-110, 68], [-168, 66]],
  // Europe + Africa
  [[-9, 43], [-1, 36], [11, 33], [32, 31], [43, 12], [51, 12], [40, -16],
   [31, -29], [18, -34], [12, -6], [9, 4], [-17, 15], [-9, 43]],
  [[-10, 51], [3, 51], [8, 54], [27, 60], [40, 66], [30, 45], [36, 36],
   [23, 36], [19, 40], [14, 38], [3, 43], [-10, 36], [-10, 51]],
  // Asia
  [[40, 66], [60, 70], [100, 77], [140, 72], [179, 65], [160, 60], [135, 43],
   [122, 40], [122, 31], [109, 18], [104, 1], [95, 6], [88, 22], [77, 8],
   [67, 24], [57, 27], [48, 30], [36, 36], [30, 45], [40, 66]],
  // Australia
  [[114, -22], [130, -12], [143, -11], [153, -28], [146, -39], [129, -32],
   [115, -35], [114, -22]],
];

// equirectangular projection into a width x height viewport
export function project(lon: number, lat: number, width: number,
                        height: number): [number, number] {
  const x = ((lon + 180) / 360) * width;
  const y = ((90 - lat) / 180) * height;
  return [x, y];
}
