import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    // live.test.ts spawns the real service; give it room to boot
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
