/** jsdom lacks a 2D canvas; tests only need a structurally honest stub. */

export function installCanvasStub(): void {
  const proto = HTMLCanvasElement.prototype as unknown as {
    getContext: (kind: string) => unknown;
  };
  proto.getContext = function (kind: string) {
    if (kind !== "2d") return null;
    const canvas = this as HTMLCanvasElement;
    const noop = () => undefined;
    return {
      canvas,
      imageSmoothingEnabled: true,
      fillStyle: "",
      strokeStyle: "",
      lineWidth: 1,
      createImageData: (w: number, h: number) => ({
        width: w,
        height: h,
        data: new Uint8ClampedArray(w * h * 4),
      }),
      putImageData: noop,
      drawImage: noop,
      clearRect: noop,
      fillRect: noop,
      strokeRect: noop,
      beginPath: noop,
      arc: noop,
      fill: noop,
      moveTo: noop,
      lineTo: noop,
      stroke: noop,
      save: noop,
      restore: noop,
    };
  };
}

export function fixRect(el: HTMLElement, width: number, height: number): void {
  el.getBoundingClientRect = () =>
    ({ left: 0, top: 0, x: 0, y: 0, width, height,
       right: width, bottom: height, toJSON: () => ({}) }) as DOMRect;
}

export function mouse(el: HTMLElement | Window, type: string, x: number, y: number): void {
  el.dispatchEvent(new MouseEvent(type, { clientX: x, clientY: y, bubbles: true }));
}
